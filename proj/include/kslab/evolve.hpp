/**
 * @file evolve.hpp
 * @brief Time stepping of u_t = Lap u - chi div(u grad v) + u (a - b u).
 *
 * One step of size dt is the symmetric composition
 *
 *     D(dt/2) R(dt/2) T(dt) R(dt/2) D(dt/2)
 *
 * with D the exact spectral heat flow, R the exact pointwise logistic flow
 * with coefficients frozen at the sub-step midpoint, and T the chemotactic
 * transport advanced by SSP-RK2 with a van Leer limited upwind flux. T is
 * sub-cycled when the CFL limit 0.25 h / sum_axes max|chi dv/dx| is below dt. A
 * limited face value can reach twice the cell value, so a cell emptying through
 * both faces stays nonnegative only up to this Courant number.
 */
#pragma once

#include <limits>
#include <vector>

#include "kslab/coefficients.hpp"
#include "kslab/grid.hpp"
#include "kslab/params.hpp"

namespace kslab {

/// u and the chemical v = solve_helmholtz(u) at time t.
struct State {
    double t = 0.0;
    ScalarField u;
    ScalarField v;
};

/// Builds a State, computing v from u.
State make_state(ScalarField u, double t, const Params& params);

struct StepRecord {
    double t = 0.0;   // time reached by the step
    double dt = 0.0;
    double min_u = 0.0;
    double max_u = 0.0;
    int transport_substeps = 0;
};

struct Trajectory {
    std::vector<State> states;
    std::vector<StepRecord> steps;

    const State& front() const { return states.front(); }
    const State& back() const { return states.back(); }
    double max_sup_norm() const;
};

struct StepOptions {
    double cfl = 0.25;
    /// BlowupDetected when ||u||_inf exceeds this.
    double blowup_ceiling = std::numeric_limits<double>::infinity();
    /// Values below noise_floor * max(u) are zeroed after the step (0 disables).
    double noise_floor = 1e-13;
};

/// Advances one step. Throws PositivityLoss or BlowupDetected.
State step(const State& state, double dt, const CoefficientField& coeffs, const Params& params,
           const StepOptions& options = {}, StepRecord* record = nullptr);

struct IntegratorOptions {
    double dt_max = 0.01;
    int store_every = 1;
    int max_retries = 5;
    StepOptions step;
    /// Skip the 10 * max(||u0||, a_sup/(b_inf - chi mu)) blow-up ceiling.
    bool check_blowup = true;
};

/// Integrates over [t0, t0 + horizon] with a uniform nominal step
/// horizon / ceil(horizon / dt_max). A nominal step that loses positivity is
/// retried as 2, 4, ... sub-steps, up to max_retries halvings.
Trajectory integrate(const ScalarField& u0, double t0, double horizon, const CoefficientField& coeffs,
                     const Params& params, const IntegratorOptions& options = {});

/// -chi div(u grad v) from the limited upwind flux used by the stepper.
ScalarField transport_rate(const ScalarField& u, const ScalarField& v, double chi);

/// Semi-discrete right-hand side Lap u - chi div(u grad v) + u (a - b u) at time t.
ScalarField rhs(const ScalarField& u, double t, const CoefficientField& coeffs, const Params& params);

/// Compares the stored state at sample_t against the variation-of-constants
/// form with T(t) = exp(t (Lap - I)) over [sample_t - window, sample_t],
/// integrating the Duhamel term exactly for piecewise-linear forcing.
/// Throws PreconditionError with fewer than 3 stored states in the window.
double mild_residual(const Trajectory& traj, double sample_t, const CoefficientField& coeffs, const Params& params,
                     double window = 1.0);

}  // namespace kslab
