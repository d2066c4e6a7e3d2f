/**
 * @file experiment.hpp
 * @brief Config-driven runs writing self-describing artifact directories, and run comparison.
 *
 * A run directory holds manifest.json (config echo, file blob hashes and a
 * content hash over them), summary.txt, summary.csv, the kind's CSV reports
 * and its checkpoints. Every CSV starts with a param_hash column.
 */
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "kslab/config.hpp"

namespace kslab {

struct RunOutcome {
    bool ok = false;
    std::string error;          // runtime failure message when !ok
    std::string dir;
    std::string content_hash;
    std::vector<std::pair<std::string, double>> summary;
};

/// Runs `config` into `out_dir` (config.out when empty). Throws PreconditionError
/// before anything runs when the directory is unusable; a failure during the run
/// is caught and recorded as a manifest with status "failed".
///
/// An existing directory must be empty or hold an earlier manifest, whose files
/// are removed first.
RunOutcome run_experiment(const ExperimentConfig& config, std::string out_dir = "", int workers = 1);

/// Closed-form constants for the config's model: slacks, rectangle, speeds,
/// thresholds, the box eigenvalue, contraction and perturbation constants.
std::vector<std::pair<std::string, double>> audit_table(const ExperimentConfig& config);

struct DiffEntry {
    std::string file;
    std::string column;
    double max_abs = 0.0;
    double max_rel = 0.0;
    std::size_t rows = 0;
};

struct CompareResult {
    std::string kind;
    /// Columns with a nonzero difference.
    std::vector<DiffEntry> entries;
    /// Structural differences: missing files, row counts, text cells, grids.
    std::vector<std::string> notes;

    bool empty() const { return entries.empty() && notes.empty(); }
    /// True when no note is present and every max_abs is <= tolerance.
    bool within(double tolerance) const;
};

/// Throws PreconditionError on a missing or malformed manifest, or when the kinds differ.
CompareResult compare_runs(const std::string& dir1, const std::string& dir2);

}  // namespace kslab
