/**
 * @file oracles.hpp
 * @brief Closed-form predictions: comparison ODE envelopes, pointwise lower
 * bounds, spreading speeds, the box principal eigenvalue and the
 * perturbation/contraction constants.
 */
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kslab/coefficients.hpp"
#include "kslab/params.hpp"

namespace kslab {

/// One predicted-vs-measured comparison. margin > 0 means the bound holds.
struct BoundCheck {
    std::string name;
    double measured = 0.0;
    double bound = 0.0;
    double margin = 0.0;
    bool pass = false;
};

struct BoundsReport {
    std::vector<double> times;
    std::vector<double> lower;
    std::vector<double> upper;
    double limit_lower = 0.0;
    double limit_upper = 0.0;
    std::string provenance;
    std::vector<BoundCheck> checks;

    bool all_pass() const;
};

/// Solution of y' = y (r - s y), y(0) = y0, in closed form.
double logistic_closed_form(double r, double s, double y0, double t);

/// Classical RK4 with step doubling until successive estimates differ by < tol.
double integrate_scalar_ode(const std::function<double(double, double)>& f, double y0, double t0, double t1,
                            double tol = 1e-10);

/// Logistic comparison pair started from u_inf0 (lower) and u_sup0 (upper):
///   l' = l (a_inf - chi mu u+_sup - (b_sup - chi mu) l)
///   U' = U (a_sup - chi mu u+_inf - (b_inf - chi mu) U)
/// sampled at `samples` equispaced times on [0, horizon].
BoundsReport comparison_envelopes(double u_inf0, double u_sup0, double uplus_inf, double uplus_sup,
                                  const CoefficientField& coeffs, const Params& params, double horizon,
                                  int samples = 101);

/// u0_inf exp(t (a_inf - b_sup ||u0|| e^{T a_sup})) for 0 <= t <= T.
double pointwise_lower_bound(double u0_inf, double u0_sup, double T, double t, const CoefficientField& coeffs);

/// M_T = a_inf e^{-a_sup T} / b_sup: data below it never drops below its infimum on [0, T].
double lower_bound_threshold(double T, const CoefficientField& coeffs);

/// First Dirichlet eigenvalue of -Lap - a0 on (-L, L)^N: N (pi / 2L)^2 - a0.
double dirichlet_principal_eigenvalue(double L, double a0, int dim);

/// L0 = (pi/2) sqrt(N / a0): the eigenvalue is negative for every L > L0.
double dirichlet_negativity_threshold(double a0, int dim);

struct SpreadingReport {
    double c_plus_star = 0.0;
    double c_minus_star = 0.0;
    bool c_minus_applicable = false;  // false when (H3) fails
    double slack_h3 = 0.0;
    std::optional<double> measured_speed;
};

SpreadingReport spreading_speeds(const CoefficientField& coeffs, const Params& params);

/// Eventual sup bound (a_sup - chi mu m) / (b_inf - chi mu) given a persistent lower level m.
double eventual_sup_bound(double m_u0, const CoefficientField& coeffs, const Params& params);

/// K = 2 + sqrt(N / lambda) sup_t ||grad ln u0+||.
double perturbation_constant(double grad_log_sup, const Params& params);

/// chi mu a_sup u0+_sup K / ((b_inf - chi mu) b_inf u0+_inf).
double perturbation_bound(double chi, double K, double uplus0_inf, double uplus0_sup, const CoefficientField& coeffs,
                          const Params& params);

/// C1 = 1 + C0 sqrt(N) / (u+_inf sqrt(lambda)).
double gradient_constant(double c0, double uplus_inf, const Params& params);

/// rho = chi mu C1 u+_sup / ((b_inf - chi mu) u+_inf).
double contraction_rho(double c1, double uplus_inf, double uplus_sup, const CoefficientField& coeffs,
                       const Params& params);

/// chi mu / (b_inf - chi mu), the factor for space-independent u+.
double homogeneous_contraction_rho(const CoefficientField& coeffs, const Params& params);

}  // namespace kslab
