#include "kslab/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "kslab/error.hpp"
#include "kslab/model.hpp"

namespace kslab {

bool BoundsReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const BoundCheck& c) { return c.pass; });
}

double logistic_closed_form(double r, double s, double y0, double t) {
    if (r > 0.0) {
        // Divide through by e^{rt} so large rt cannot overflow.
        const double decay = std::exp(-r * t);
        return y0 / (decay - s * y0 * std::expm1(-r * t) / r);
    }
    const double q = r != 0.0 ? std::expm1(r * t) / r : t;  // (e^{rt} - 1) / r
    return y0 * (1.0 + r * q) / (1.0 + s * y0 * q);
}

double integrate_scalar_ode(const std::function<double(double, double)>& f, double y0, double t0, double t1,
                            double tol) {
    auto rk4 = [&](int n) {
        const double h = (t1 - t0) / n;
        double y = y0;
        for (int i = 0; i < n; ++i) {
            const double t = t0 + i * h;
            const double k1 = f(t, y);
            const double k2 = f(t + 0.5 * h, y + 0.5 * h * k1);
            const double k3 = f(t + 0.5 * h, y + 0.5 * h * k2);
            const double k4 = f(t + h, y + h * k3);
            y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        return y;
    };
    if (t1 == t0) return y0;
    int n = std::max(16, static_cast<int>(std::ceil(std::abs(t1 - t0) * 16.0)));
    double coarse = rk4(n);
    for (int attempt = 0; attempt < 20; ++attempt) {
        n *= 2;
        const double fine = rk4(n);
        // Richardson-corrected estimate for fourth order.
        if (std::abs(fine - coarse) < 15.0 * tol) return fine + (fine - coarse) / 15.0;
        coarse = fine;
    }
    throw ConvergenceFailure("integrate_scalar_ode: tolerance not reached", std::abs(coarse));
}

BoundsReport comparison_envelopes(double u_inf0, double u_sup0, double uplus_inf, double uplus_sup,
                                  const CoefficientField& coeffs, const Params& params, double horizon, int samples) {
    coeffs.require_positive_bounded();
    const double cm = params.chi * params.mu;
    if (!(coeffs.b_sup() > cm) || !(coeffs.b_inf() > cm))
        throw HypothesisViolation("comparison_envelopes: requires b_inf > chi*mu");
    if (!(u_inf0 > 0.0 && u_sup0 >= u_inf0 && uplus_inf > 0.0 && uplus_sup >= uplus_inf))
        throw PreconditionError("comparison_envelopes: inputs must be positive and ordered");
    if (!(horizon >= 0.0) || samples < 2) throw PreconditionError("comparison_envelopes: bad sampling");

    const double r_low = coeffs.a_inf() - cm * uplus_sup;
    const double s_low = coeffs.b_sup() - cm;
    const double r_up = coeffs.a_sup() - cm * uplus_inf;
    const double s_up = coeffs.b_inf() - cm;

    BoundsReport rep;
    rep.provenance = "logistic comparison pair (constant envelopes, closed form)";
    rep.limit_lower = std::max(r_low, 0.0) / s_low;
    rep.limit_upper = std::max(r_up, 0.0) / s_up;
    for (int i = 0; i < samples; ++i) {
        const double t = horizon * i / (samples - 1);
        rep.times.push_back(t);
        rep.lower.push_back(logistic_closed_form(r_low, s_low, u_inf0, t));
        rep.upper.push_back(logistic_closed_form(r_up, s_up, u_sup0, t));
    }
    return rep;
}

double pointwise_lower_bound(double u0_inf, double u0_sup, double T, double t, const CoefficientField& coeffs) {
    if (!(t >= 0.0 && t <= T)) throw PreconditionError("pointwise_lower_bound: requires 0 <= t <= T");
    const double rate = coeffs.a_inf() - coeffs.b_sup() * u0_sup * std::exp(T * coeffs.a_sup());
    return u0_inf * std::exp(t * rate);
}

double lower_bound_threshold(double T, const CoefficientField& coeffs) {
    return coeffs.a_inf() * std::exp(-coeffs.a_sup() * T) / coeffs.b_sup();
}

double dirichlet_principal_eigenvalue(double L, double a0, int dim) {
    if (!(L > 0.0)) throw PreconditionError("dirichlet_principal_eigenvalue: L must be positive");
    const double base = std::numbers::pi / (2.0 * L);
    return dim * base * base - a0;
}

double dirichlet_negativity_threshold(double a0, int dim) {
    if (!(a0 > 0.0)) throw PreconditionError("dirichlet_negativity_threshold: a0 must be positive");
    return 0.5 * std::numbers::pi * std::sqrt(dim / a0);
}

SpreadingReport spreading_speeds(const CoefficientField& coeffs, const Params& params) {
    const auto hyp = validate_coefficients(coeffs, params);
    SpreadingReport rep;
    rep.slack_h3 = hyp.slack_h3;
    const double cm = params.chi * params.mu;
    const double gap = coeffs.b_inf() - cm;
    const double a_sup = coeffs.a_sup();
    const double drift = cm * std::sqrt(static_cast<double>(params.dim)) * a_sup / (2.0 * gap * std::sqrt(params.lambda));
    if (hyp.holds_h1) rep.c_plus_star = 2.0 * std::sqrt(a_sup) + drift;
    else rep.c_plus_star = std::numeric_limits<double>::infinity();
    rep.c_minus_applicable = hyp.holds_h3;
    if (hyp.holds_h3) {
        rep.c_minus_star = 2.0 * std::sqrt(coeffs.a_inf() - cm * a_sup / gap) - drift;
    } else {
        rep.c_minus_star = std::numeric_limits<double>::quiet_NaN();
    }
    return rep;
}

double eventual_sup_bound(double m_u0, const CoefficientField& coeffs, const Params& params) {
    if (!(m_u0 >= 0.0)) throw PreconditionError("eventual_sup_bound: m must be >= 0");
    const double cm = params.chi * params.mu;
    return (coeffs.a_sup() - cm * m_u0) / (coeffs.b_inf() - cm);
}

double perturbation_constant(double grad_log_sup, const Params& params) {
    return 2.0 + std::sqrt(params.dim / params.lambda) * grad_log_sup;
}

double perturbation_bound(double chi, double K, double uplus0_inf, double uplus0_sup, const CoefficientField& coeffs,
                          const Params& params) {
    const double cm = chi * params.mu;
    return cm * coeffs.a_sup() * uplus0_sup * K / ((coeffs.b_inf() - cm) * coeffs.b_inf() * uplus0_inf);
}

double gradient_constant(double c0, double uplus_inf, const Params& params) {
    return 1.0 + c0 * std::sqrt(static_cast<double>(params.dim)) / (uplus_inf * std::sqrt(params.lambda));
}

double contraction_rho(double c1, double uplus_inf, double uplus_sup, const CoefficientField& coeffs,
                       const Params& params) {
    const double cm = params.chi * params.mu;
    return cm * c1 * uplus_sup / ((coeffs.b_inf() - cm) * uplus_inf);
}

double homogeneous_contraction_rho(const CoefficientField& coeffs, const Params& params) {
    const double cm = params.chi * params.mu;
    return cm / (coeffs.b_inf() - cm);
}

}  // namespace kslab
