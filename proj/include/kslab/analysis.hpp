/**
 * @file analysis.hpp
 * @brief Measured quantities: ratio dynamics, decay rates, contraction factors,
 *        front speeds and chemotactic perturbation gaps.
 */
#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "kslab/entire.hpp"
#include "kslab/evolve.hpp"
#include "kslab/oracles.hpp"

namespace kslab {

/// ||U - 1|| and ||V - 1|| with U = u / u+ and V = v / v+ at each stored time.
struct RatioSeries {
    std::vector<double> times;
    std::vector<double> u_gap;
    std::vector<double> v_gap;
};

/// Throws PreconditionError when the grids differ or a time falls outside the solution window.
RatioSeries ratio_series(const Trajectory& traj, const EntireSolution& sol, const Params& params);

enum class FitStatus { ok, no_decay };

const char* to_string(FitStatus s);

/// series ~ prefactor * exp(-alpha t).
struct DecayFit {
    FitStatus status = FitStatus::no_decay;
    double alpha = 0.0;
    double prefactor = 0.0;
    double residual = 0.0;  // RMS misfit of log(series)
    std::size_t points = 0;
};

/// Least squares on log(series) over the tail half of the entries above
/// `floor`. NoDecay when fewer than 3 such points remain or the slope is >= 0.
DecayFit fit_decay_rate(const std::vector<double>& times, const std::vector<double>& series, double floor = 1e-11);

struct ContractionReport {
    double rho = 0.0;
    double c0 = 0.0;
    double c0_error = std::numeric_limits<double>::quiet_NaN();
    double c1 = 1.0;
    bool homogeneous = false;
};

/// rho = chi mu C1 u+_sup / ((b_inf - chi mu) u+_inf) with C1 = 1 + C0 sqrt(N) / (u+_inf sqrt(lambda))
/// and C0 = sup ||grad u+|| measured on `sol`. A space-independent u+ uses chi mu / (b_inf - chi mu).
/// When `refined` (the same construction on a finer grid) is given, c0_error = |C0(refined) - C0|.
ContractionReport contraction_factor(const EntireSolution& sol, const Params& params, const CoefficientField& coeffs,
                                     const EntireSolution* refined = nullptr);

struct Chi0Options {
    EntireOptions entire;
    double tolerance = 1e-4;
    bool refine = false;  // attach C0 error bars from a doubled grid
    int workers = 1;
};

struct Chi0Result {
    /// Upper end of the final bisection bracket; empty when rho >= 1 at the smallest grid chi.
    std::optional<double> chi0;
    /// true when rho < 1 at every grid point, so chi0 is only a lower estimate.
    bool censored = false;
    std::vector<double> chi_grid;
    std::vector<ContractionReport> grid_reports;
};

Chi0Result chi0_surrogate(const CoefficientField& coeffs, const Params& params, std::vector<double> chi_grid,
                          const Chi0Options& options = {});

enum class LevelStatus { pass, indeterminate };

const char* to_string(LevelStatus s);

struct StaircaseLevel {
    int n = 0;
    double bound = 0.0;
    LevelStatus status = LevelStatus::indeterminate;
    /// Earliest stored time from which every later value satisfies the bound.
    std::optional<double> first_passage;
};

/// Level n bound rho^n a_sup / ((b_inf - chi mu) u+_sup) + eps, or with the
/// space-independent factor and u+_inf in the denominator, eps = 0.01 a_sup / (b_inf - chi mu).
/// Throws PreconditionError when rho >= 1.
std::vector<StaircaseLevel> staircase_check(const Trajectory& traj, const EntireSolution& sol, const Params& params,
                                            const CoefficientField& coeffs, int n_max);

struct StabilityReport {
    RatioSeries series;
    DecayFit fit;
    ContractionReport contraction;
    std::vector<StaircaseLevel> levels;  // empty when rho >= 1
};

StabilityReport stability_report(const Trajectory& traj, const EntireSolution& sol, const Params& params,
                                 const CoefficientField& coeffs, int n_max = 3);

struct FrontOptions {
    double fit_fraction = 1.0 / 3.0;
    int boundary_cells = 10;
};

struct FrontMeasurement {
    std::vector<double> times;
    std::vector<double> positions;
    double speed = 0.0;
    double intercept = 0.0;
    double residual = 0.0;
};

/// Rightmost crossing of u = threshold (the row nearest y = 0 in 2D), with the
/// speed fitted over the last part of the run. Throws NoFront when max u is below
/// the threshold and BoxTooSmall when the front nears the box edge.
FrontMeasurement front_speed(const Trajectory& traj, double threshold, const FrontOptions& options = {});

/// M_lower / 2 when the rectangle hypothesis holds, otherwise a_inf / (4 b_sup).
double default_front_threshold(const CoefficientField& coeffs, const Params& params);

struct PerturbationRow {
    double chi = 0.0;
    double gap = 0.0;  // sup_t ||u_chi - u_0||
    double ratio = 0.0;
    double entire_gap = std::numeric_limits<double>::quiet_NaN();
    double bound = std::numeric_limits<double>::quiet_NaN();
    bool bound_holds = false;
    std::string error;  // empty on success
};

struct PerturbationReport {
    std::vector<PerturbationRow> rows;
    double K = 0.0;
    double uplus0_inf = 0.0;
    double uplus0_sup = 0.0;

    bool complete() const;
    /// (max - min) / min of gap / chi over the successful rows.
    double ratio_spread() const;
};

struct PerturbationOptions {
    IntegratorOptions integrator;
    EntireOptions entire;
    bool with_entire = true;
    int workers = 1;
};

PerturbationReport perturbation_study(const ScalarField& u0, const std::vector<double>& chi_list, double horizon,
                                      const CoefficientField& coeffs, const Params& params,
                                      const PerturbationOptions& options = {});

/// sup over the stored slices of `a` of ||a(t) - b(t)||.
double entire_distance(const EntireSolution& a, const EntireSolution& b);

}  // namespace kslab
