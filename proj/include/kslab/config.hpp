/**
 * @file config.hpp
 * @brief Flat "key = value" experiment configs.
 *
 * Lines are "key = value"; '#' starts a comment. Model keys: chi, lambda, mu,
 * dim, box, grid, a.kind, a.params, b.kind, b.params, period. Coefficient
 * params by kind:
 *
 *     constant      value
 *     separable     offset; amp kx [ky] phase omega tphase; ...   (ky only when dim = 2)
 *     tabulated     path to a JSON table {dim, nodes, half_length, times, values}
 *
 * Each separable term is amp cos(k.x + phase) cos(omega t + tphase).
 */
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kslab/coefficients.hpp"
#include "kslab/grid.hpp"
#include "kslab/params.hpp"

namespace kslab {

using ConfigMap = std::map<std::string, std::string>;

/// Throws FormatError naming the line on malformed or duplicate entries.
ConfigMap parse_config_text(const std::string& text);

enum class ExperimentKind { simulate, entire, stability, spreading, perturbation, oracle_audit };

const char* to_string(ExperimentKind kind);

struct InitialSpec {
    enum class Kind { constant, bump, random_band } kind = Kind::constant;
    double value = 0.5;      // constant level, or bump height
    double radius = 1.0;     // bump: height * exp(-|x|^2 / radius^2)
    double lo = 0.1;         // random-band range
    double hi = 1.0;
    int modes = 8;           // random-band: wavenumbers 1..modes per axis
    std::optional<std::uint64_t> seed;
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::simulate;
    Params params;
    std::string a_kind = "constant", a_params = "1";
    std::string b_kind = "constant", b_params = "1";
    std::optional<double> period;
    InitialSpec initial;
    double horizon = 0.0;
    std::string out;
    std::vector<int> resolutions;
    double dt_max = 0.01;
    int store_every = 10;
    std::vector<double> chi_list;      // perturbation
    std::optional<double> threshold;   // spreading
    int n_max = 3;                     // stability
    std::vector<int> depths{8, 16, 32};  // entire, pullback route
    double pullback_unit = 1.0;
    /// Directory holding relative table paths.
    std::string base_dir;
};

/// Validates every key and collects all problems into one PreconditionError.
ExperimentConfig parse_experiment(const ConfigMap& map, const std::string& base_dir = "");

ExperimentConfig load_experiment(const std::string& path);

/// Canonical key/value form (numbers with 17 significant digits); round-trips through parse_experiment.
ConfigMap to_config_map(const ExperimentConfig& config);

std::string serialize_config(const ConfigMap& map);

/// Model-only keys, hashed to key report rows.
std::string parameter_hash(const ExperimentConfig& config);

CoefficientField build_coefficients(const ExperimentConfig& config);

ScalarField build_initial(const InitialSpec& spec, const Grid& grid);

}  // namespace kslab
