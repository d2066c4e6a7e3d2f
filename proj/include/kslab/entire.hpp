/**
 * @file entire.hpp
 * @brief Strictly positive entire solutions: steady states, periodic orbits and pullback limits.
 */
#pragma once

#include <string>
#include <vector>

#include "kslab/coefficients.hpp"
#include "kslab/evolve.hpp"
#include "kslab/oracles.hpp"
#include "kslab/params.hpp"

namespace kslab {

enum class Representation { steady, periodic, window };

const char* to_string(Representation r);

struct EntireStats {
    double u_inf = 0.0;
    double u_sup = 0.0;
    double grad_sup = 0.0;      // sup_t ||grad u+||, the measured C0
    double grad_log_sup = 0.0;  // sup_t ||grad ln u+||
};

/// Stored approximation of (u+, v+).
///
/// steady: one state. periodic: uniformly spaced slices over [0, period],
/// the last slice being the image of the first under one period. window:
/// uniformly spaced slices over [-span, 0].
struct EntireSolution {
    Representation representation = Representation::steady;
    double period = 0.0;
    std::vector<State> states;
    EntireStats stats;
    bool converged = false;
    /// Newton residuals, Poincare displacements or pullback increments, in order.
    std::vector<double> history;
    /// Final convergence measure for the construction.
    double defect = 0.0;
    /// Pullback only: false when the increments stopped decreasing.
    bool cauchy = true;

    const Grid& grid() const { return states.front().u.grid(); }
    double start_time() const { return states.front().t; }
    double end_time() const { return states.back().t; }

    /// u+ at time t: constant for steady, wrapped for periodic, and
    /// restricted to the stored window otherwise. Cubic Lagrange in time.
    ScalarField u_at(double t) const;
};

EntireStats compute_stats(const std::vector<State>& states);

struct SteadyOptions {
    double warmup_horizon = 10.0;
    double dt_max = 0.01;
    double tolerance = 1e-8;
    int max_newton = 40;
    int gmres_restart = 50;
    int gmres_max = 600;
};

/// Newton-Krylov solve of Lap u - chi div(u grad v) + u (a - b u) = 0 after a
/// warm-up integration. Throws ConvergenceFailure when the residual stays
/// above tolerance or positivity cannot be certified.
EntireSolution find_steady_state(const CoefficientField& coeffs, const Params& params, const SteadyOptions& options = {});

struct PeriodicOptions {
    double dt_max = 5e-4;
    double tolerance = 1e-7;
    double theta = 0.8;
    double theta_fallback = 0.3;
    int warmup_periods = 4;
    int max_iterations = 400;
    /// Slices stored per period (the step count is rounded up to a multiple).
    int slices = 200;
};

/// Damped Picard iteration on the period map. Throws ConvergenceFailure with
/// the displacement history when the tolerance is not met.
EntireSolution find_periodic_entire_solution(const CoefficientField& coeffs, const Params& params,
                                             const PeriodicOptions& options = {});

struct PullbackOptions {
    double dt_max = 5e-4;
    /// Slices stored per unit T in the returned window.
    int slices = 200;
    /// converged requires the last increment below this.
    double tolerance = 1e-6;
};

/// Solves from t = -kT with constant data delta0 = min(M_T, a_inf / (2 b_sup))
/// for each k in `depths` and compares the time-0 slices. Returns the deepest
/// run over [-T, 0]; `history` holds the successive increments.
EntireSolution pullback_entire_solution(const CoefficientField& coeffs, const Params& params,
                                        const std::vector<int>& depths, double T, const PullbackOptions& options = {});

/// Initial constant used by the pullback construction.
double pullback_seed(const CoefficientField& coeffs, double T);

/// Positivity, the sup bounds a_inf/b_sup <= sup u+ <= a_sup/(b_inf - chi mu)
/// (1% tolerance) and, when the rectangle hypothesis holds, the pointwise
/// rectangle bounds with tolerance rectangle_tol * upper.
BoundsReport certify_entire_bounds(const EntireSolution& sol, const CoefficientField& coeffs, const Params& params,
                                   double rectangle_tol = 1e-6);

/// Max over stored slices of the residual of both equations divided by a_sup.
/// Time derivatives use fourth-order differences.
double entire_residual(const EntireSolution& sol, const CoefficientField& coeffs, const Params& params);

struct EntireOptions {
    SteadyOptions steady;
    PeriodicOptions periodic;
    PullbackOptions pullback;
    std::vector<int> depths{8, 16, 32};
    double pullback_unit = 1.0;
};

/// Picks the construction from the coefficients: steady when autonomous,
/// periodic when a period is set, pullback otherwise.
EntireSolution construct_entire_solution(const CoefficientField& coeffs, const Params& params,
                                         const EntireOptions& options = {});

}  // namespace kslab
