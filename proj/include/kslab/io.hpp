/**
 * @file io.hpp
 * @brief Field files, trajectory checkpoints and entire-solution directories.
 *
 * Binary field layout (little endian):
 *
 *     "KSFIELD1" | int32 dim | int32 points per axis (dim times) | f64 spacing | f64 half_length | f64 payload
 *
 * The payload is row-major with x fastest.
 */
#pragma once

#include <string>

#include "kslab/entire.hpp"
#include "kslab/evolve.hpp"
#include "kslab/grid.hpp"

namespace kslab {

void write_field_binary(const std::string& path, const ScalarField& field);

/// Throws FormatError on a bad magic, inconsistent header or short payload.
ScalarField read_field_binary(const std::string& path);

/// "x,u" or "x,y,u" rows with 17 significant digits. Refuses grids above 2^16 nodes.
void write_field_csv(const std::string& path, const ScalarField& field);

/// Writes trajectory.json (times and step diagnostics) plus one u file per stored state.
void save_trajectory(const std::string& dir, const Trajectory& traj);

/// Reads a checkpoint written by save_trajectory; v is recomputed from u.
Trajectory load_trajectory(const std::string& dir, const Params& params);

/// Continues a (possibly loaded) trajectory from its last state to t_end.
Trajectory resume_trajectory(const Trajectory& partial, double t_end, const CoefficientField& coeffs,
                             const Params& params, const IntegratorOptions& options = {});

void save_entire(const std::string& dir, const EntireSolution& sol);

EntireSolution load_entire(const std::string& dir, const Params& params);

/// 17 significant digits, the format used for every numeric output.
std::string format_number(double x);

/// Writes text, creating parent directories. Throws Error on failure.
void write_text(const std::string& path, const std::string& text);

std::string read_text(const std::string& path);

}  // namespace kslab
