#include "kslab/entire.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "kslab/elliptic.hpp"
#include "kslab/error.hpp"
#include "kslab/krylov.hpp"
#include "kslab/log.hpp"
#include "kslab/model.hpp"

namespace kslab {
namespace {

void require_h1(const CoefficientField& coeffs, const Params& params, const char* who) {
    params.validate();
    const auto hyp = validate_coefficients(coeffs, params);
    if (!hyp.holds_h1) throw HypothesisViolation(std::string(who) + ": requires b_inf > chi*mu");
    coeffs.require_box_compatible(params.grid());
}

ScalarField initial_guess(const CoefficientField& coeffs, const Grid& grid) {
    const auto a = coeffs.sample_grid(Which::a, grid, 0.0);
    const auto b = coeffs.sample_grid(Which::b, grid, 0.0);
    ScalarField u(grid);
    for (std::size_t k = 0; k < u.size(); ++k) u[k] = a[k] / b[k];
    return u;
}

std::string format_history(const std::vector<double>& h) {
    std::ostringstream os;
    os.precision(3);
    for (std::size_t i = 0; i < h.size(); ++i) os << (i ? ", " : "") << h[i];
    return os.str();
}

/// Cubic Lagrange weights for nodes -1, 0, 1, 2 at offset s in [0, 1).
std::array<double, 4> cubic_weights(double s) {
    return {-s * (s - 1) * (s - 2) / 6.0, (s + 1) * (s - 1) * (s - 2) / 2.0, -(s + 1) * s * (s - 2) / 2.0,
            (s + 1) * s * (s - 1) / 6.0};
}

/// Steps per period rounded up to a multiple of the slice count.
long steps_per_period(double T, double dt_max, int slices) {
    const long m = static_cast<long>(std::ceil(T / dt_max - 1e-9));
    return slices * ((m + slices - 1) / slices);
}

double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace

const char* to_string(Representation r) {
    switch (r) {
        case Representation::steady: return "steady";
        case Representation::periodic: return "periodic";
        case Representation::window: return "window";
    }
    return "?";
}

ScalarField EntireSolution::u_at(double t) const {
    if (states.empty()) throw PreconditionError("EntireSolution: no stored states");
    if (representation == Representation::steady || states.size() == 1) return states.front().u;
    const long m = static_cast<long>(states.size()) - 1;
    const double t0 = states.front().t;
    const double span = states.back().t - t0;
    const double dt = span / m;
    auto slice = [&](long j) -> const ScalarField& { return states[j].u; };

    double pos;
    if (representation == Representation::periodic) {
        double phase = std::fmod(t - t0, period);
        if (phase < 0) phase += period;
        pos = phase / dt;
    } else {
        const double slack = 1e-9 * std::max(1.0, std::abs(span));
        if (t < t0 - slack || t > states.back().t + slack)
            throw PreconditionError("EntireSolution: time outside the stored window");
        pos = std::clamp((t - t0) / dt, 0.0, static_cast<double>(m));
    }
    long i = static_cast<long>(std::floor(pos));
    double s = pos - i;
    if (s < 1e-12) return slice(representation == Representation::periodic ? i % m : std::min(i, m));
    if (1 - s < 1e-12) return slice(representation == Representation::periodic ? (i + 1) % m : std::min(i + 1, m));

    long base = i - 1;
    if (representation == Representation::window) {
        if (m < 3) {
            return (1 - s) * slice(i) + s * slice(i + 1);
        }
        base = std::clamp(base, 0L, m - 3);
        s = pos - (base + 1);
    }
    const auto w = cubic_weights(s);
    ScalarField out(grid());
    for (int j = 0; j < 4; ++j) {
        long idx = base + j;
        if (representation == Representation::periodic) idx = ((idx % m) + m) % m;
        const auto& f = slice(idx);
        for (std::size_t k = 0; k < out.size(); ++k) out[k] += w[j] * f[k];
    }
    return out;
}

EntireStats compute_stats(const std::vector<State>& states) {
    EntireStats st;
    st.u_inf = std::numeric_limits<double>::infinity();
    st.u_sup = -st.u_inf;
    for (const auto& s : states) {
        st.u_inf = std::min(st.u_inf, s.u.min());
        st.u_sup = std::max(st.u_sup, s.u.max());
        const auto g = gradient(s.u);
        st.grad_sup = std::max(st.grad_sup, g.max_norm());
        for (std::size_t k = 0; k < s.u.size(); ++k) {
            double sq = 0.0;
            for (const auto& c : g.components) sq += c[k] * c[k];
            st.grad_log_sup = std::max(st.grad_log_sup, std::sqrt(sq) / s.u[k]);
        }
    }
    return st;
}

EntireSolution find_steady_state(const CoefficientField& coeffs, const Params& params, const SteadyOptions& options) {
    if (!coeffs.autonomous()) throw PreconditionError("find_steady_state: coefficients must be time independent");
    require_h1(coeffs, params, "find_steady_state");
    const Grid grid = params.grid();

    ScalarField u = initial_guess(coeffs, grid);
    if (options.warmup_horizon > 0) {
        IntegratorOptions io;
        io.dt_max = options.dt_max;
        io.store_every = 1 << 30;
        u = integrate(u, 0.0, options.warmup_horizon, coeffs, params, io).back().u;
    }

    EntireSolution sol;
    sol.representation = Representation::steady;
    auto residual = [&](const ScalarField& w) { return rhs(w, 0.0, coeffs, params); };
    ScalarField F = residual(u);
    double r = F.max_abs();
    sol.history.push_back(r);

    const double shift = 0.5 * (coeffs.a_inf() + coeffs.a_sup());
    const LinearMap precond = [&](const std::vector<double>& x) {
        return solve_shifted_laplacian(ScalarField(grid, x), shift).data();
    };

    for (int it = 0; it < options.max_newton && r > options.tolerance; ++it) {
        const double unorm = norm2(u.data());
        const LinearMap jac = [&](const std::vector<double>& x) {
            const double xn = norm2(x);
            if (xn == 0.0) return std::vector<double>(x.size(), 0.0);
            const double eps = 1.4901161193847656e-08 * (1.0 + unorm) / xn;
            ScalarField shifted = u;
            for (std::size_t k = 0; k < x.size(); ++k) shifted[k] += eps * x[k];
            auto out = residual(shifted).data();
            for (std::size_t k = 0; k < out.size(); ++k) out[k] = (out[k] - F[k]) / eps;
            return out;
        };
        std::vector<double> minus_f = F.data();
        for (double& x : minus_f) x = -x;
        const double forcing = std::clamp(r, 1e-10, 1e-3);
        const auto lin = gmres(jac, precond, minus_f, forcing, options.gmres_restart, options.gmres_max);

        // Backtracking on the sup-norm residual, keeping u strictly positive.
        double step = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 12; ++ls, step *= 0.5) {
            ScalarField trial = u;
            for (std::size_t k = 0; k < trial.size(); ++k) trial[k] += step * lin.x[k];
            if (!(trial.min() > 0.0) || !trial.all_finite()) continue;
            ScalarField Ft = residual(trial);
            const double rt = Ft.max_abs();
            if (rt < (1.0 - 1e-4 * step) * r) {
                u = std::move(trial);
                F = std::move(Ft);
                r = rt;
                accepted = true;
                break;
            }
        }
        sol.history.push_back(r);
        if (!accepted) break;
    }

    State st = make_state(u, 0.0, params);
    sol.defect = std::max(r, helmholtz_residual(st.u, st.v, params));
    sol.states.push_back(std::move(st));
    sol.stats = compute_stats(sol.states);
    if (!(sol.defect <= options.tolerance))
        throw ConvergenceFailure("find_steady_state: residual history " + format_history(sol.history), sol.defect);
    const double floor = 1e-6 * coeffs.a_inf() / coeffs.b_sup();
    if (!(sol.stats.u_inf >= floor))
        throw ConvergenceFailure("find_steady_state: converged state is not strictly positive", sol.stats.u_inf);
    sol.converged = true;
    return sol;
}

EntireSolution find_periodic_entire_solution(const CoefficientField& coeffs, const Params& params,
                                             const PeriodicOptions& options) {
    if (!coeffs.period()) throw PreconditionError("find_periodic_entire_solution: coefficients have no period");
    if (options.slices < 4) throw PreconditionError("find_periodic_entire_solution: need at least 4 slices");
    require_h1(coeffs, params, "find_periodic_entire_solution");
    const double T = *coeffs.period();
    const long m = steps_per_period(T, options.dt_max, options.slices);

    IntegratorOptions io;
    io.dt_max = T / static_cast<double>(m);
    io.store_every = static_cast<int>(m);
    auto period_map = [&](const ScalarField& w) { return integrate(w, 0.0, T, coeffs, params, io).back().u; };

    ScalarField u = initial_guess(coeffs, params.grid());
    for (int k = 0; k < options.warmup_periods; ++k) u = period_map(u);

    EntireSolution sol;
    sol.representation = Representation::periodic;
    sol.period = T;
    double theta = options.theta;
    double disp = std::numeric_limits<double>::infinity();
    for (int it = 0; it < options.max_iterations; ++it) {
        ScalarField d = period_map(u);
        d -= u;
        const double next = d.max_abs();
        sol.history.push_back(next);
        if (next <= options.tolerance) {
            disp = next;
            break;
        }
        if (next > disp && theta != options.theta_fallback) {
            theta = options.theta_fallback;
            log::info("find_periodic_entire_solution: displacement grew, damping to " + std::to_string(theta));
        }
        disp = next;
        d *= theta;
        u += d;
    }
    sol.defect = sol.history.empty() ? 0.0 : sol.history.back();
    if (!(sol.defect <= options.tolerance))
        throw ConvergenceFailure("find_periodic_entire_solution: displacements " + format_history(sol.history),
                                 sol.defect);

    io.store_every = static_cast<int>(m / options.slices);
    sol.states = integrate(u, 0.0, T, coeffs, params, io).states;
    sol.stats = compute_stats(sol.states);
    if (!(sol.stats.u_inf > 0.0))
        throw ConvergenceFailure("find_periodic_entire_solution: orbit is not strictly positive", sol.stats.u_inf);
    sol.converged = true;
    return sol;
}

double pullback_seed(const CoefficientField& coeffs, double T) {
    return std::min(lower_bound_threshold(T, coeffs), coeffs.a_inf() / (2.0 * coeffs.b_sup()));
}

EntireSolution pullback_entire_solution(const CoefficientField& coeffs, const Params& params,
                                        const std::vector<int>& depths, double T, const PullbackOptions& options) {
    if (depths.empty() || !(T > 0.0)) throw PreconditionError("pullback_entire_solution: need depths and T > 0");
    for (std::size_t i = 0; i < depths.size(); ++i)
        if (depths[i] < 1 || (i && depths[i] <= depths[i - 1]))
            throw PreconditionError("pullback_entire_solution: depths must be positive and increasing");
    if (options.slices < 1) throw PreconditionError("pullback_entire_solution: need at least one slice");
    require_h1(coeffs, params, "pullback_entire_solution");

    const long m = steps_per_period(T, options.dt_max, options.slices);
    IntegratorOptions io;
    io.dt_max = T / static_cast<double>(m);
    io.store_every = static_cast<int>(m / options.slices);
    const ScalarField seed(params.grid(), pullback_seed(coeffs, T));

    EntireSolution sol;
    sol.representation = Representation::window;
    sol.period = T;
    ScalarField previous;
    Trajectory deepest;
    for (std::size_t i = 0; i < depths.size(); ++i) {
        const double start = -depths[i] * T;
        Trajectory tr = integrate(seed, start, -start, coeffs, params, io);
        if (i > 0) sol.history.push_back(sup_distance(tr.back().u, previous));
        previous = tr.back().u;
        if (i + 1 == depths.size()) deepest = std::move(tr);
    }
    for (std::size_t i = 1; i < sol.history.size(); ++i)
        if (sol.history[i] > sol.history[i - 1] && sol.history[i] > 1e-12) sol.cauchy = false;
    if (!sol.cauchy)
        log::warn("pullback_entire_solution: increments are not decreasing: " + format_history(sol.history));

    const double window_start = -T - 1e-9 * T;
    for (auto& s : deepest.states)
        if (s.t >= window_start) sol.states.push_back(std::move(s));
    sol.states.front().t = std::max(sol.states.front().t, -T);  // exact window edge for interpolation
    sol.defect = sol.history.empty() ? std::numeric_limits<double>::infinity() : sol.history.back();
    sol.stats = compute_stats(sol.states);
    sol.converged = sol.cauchy && sol.defect <= options.tolerance && sol.stats.u_inf > 0.0;
    return sol;
}

BoundsReport certify_entire_bounds(const EntireSolution& sol, const CoefficientField& coeffs, const Params& params,
                                   double rectangle_tol) {
    if (sol.states.empty()) throw PreconditionError("certify_entire_bounds: empty solution");
    const auto hyp = validate_coefficients(coeffs, params);
    const auto st = compute_stats(sol.states);
    BoundsReport rep;
    rep.provenance = "entire solution: sup bounds and attraction rectangle";

    rep.checks.push_back({"strict positivity", st.u_inf, 0.0, st.u_inf, st.u_inf > 0.0});
    const double lower_sup = coeffs.a_inf() / coeffs.b_sup();
    const double m1 = st.u_sup - 0.99 * lower_sup;
    rep.checks.push_back({"sup u >= a_inf/b_sup", st.u_sup, lower_sup, m1, m1 >= 0.0});
    double lo = 0.0, hi = std::numeric_limits<double>::infinity();
    if (hyp.holds_h1) {
        hi = sup_bound(coeffs, params);
        const double m2 = 1.01 * hi - st.u_sup;
        rep.checks.push_back({"sup u <= a_sup/(b_inf-chi mu)", st.u_sup, hi, m2, m2 >= 0.0});
    }
    if (hyp.holds_h2) {
        const auto rect = attraction_rectangle(coeffs, params);
        lo = rect.lower;
        hi = rect.upper;
        const double tol = rectangle_tol * rect.upper;
        const double m3 = st.u_inf - (rect.lower - tol);
        const double m4 = rect.upper + tol - st.u_sup;
        rep.checks.push_back({"u >= M_lower", st.u_inf, rect.lower, m3, m3 >= 0.0});
        rep.checks.push_back({"u <= M_upper", st.u_sup, rect.upper, m4, m4 >= 0.0});
    }
    rep.limit_lower = lo;
    rep.limit_upper = hi;
    for (const auto& s : sol.states) {
        rep.times.push_back(s.t);
        rep.lower.push_back(lo);
        rep.upper.push_back(hi);
    }
    return rep;
}

double entire_residual(const EntireSolution& sol, const CoefficientField& coeffs, const Params& params) {
    if (sol.states.empty()) throw PreconditionError("entire_residual: empty solution");
    double worst = 0.0;
    for (const auto& s : sol.states) worst = std::max(worst, helmholtz_residual(s.u, s.v, params));
    if (sol.representation == Representation::steady || sol.states.size() == 1) {
        worst = std::max(worst, rhs(sol.states.front().u, sol.states.front().t, coeffs, params).max_abs());
        return worst / coeffs.a_sup();
    }
    const long m = static_cast<long>(sol.states.size()) - 1;
    if (m < 4) throw PreconditionError("entire_residual: need at least 5 slices");
    const double dt = (sol.states.back().t - sol.states.front().t) / m;
    // Fourth-order stencils: central in the interior, one-sided at both ends.
    static constexpr double central[5] = {1, -8, 0, 8, -1};
    static constexpr double edge0[5] = {-25, 48, -36, 16, -3};
    static constexpr double edge1[5] = {-3, -10, 18, -6, 1};
    for (long i = 0; i <= m; ++i) {
        const auto& u = sol.states[i].u;
        const ScalarField r = rhs(u, sol.states[i].t, coeffs, params);
        long base;
        double w[5];
        if (i < 2 || i > m - 2) {
            const bool head = i < 2;
            const double* e = (head ? i : m - i) == 0 ? edge0 : edge1;
            base = head ? 0 : m - 4;
            for (int j = 0; j < 5; ++j) w[j] = head ? e[j] : -e[4 - j];
        } else {
            base = i - 2;
            for (int j = 0; j < 5; ++j) w[j] = central[j];
        }
        for (std::size_t k = 0; k < u.size(); ++k) {
            double ut = 0.0;
            for (int j = 0; j < 5; ++j) ut += w[j] * sol.states[base + j].u[k];
            worst = std::max(worst, std::abs(ut / (12.0 * dt) - r[k]));
        }
    }
    return worst / coeffs.a_sup();
}

EntireSolution construct_entire_solution(const CoefficientField& coeffs, const Params& params,
                                         const EntireOptions& options) {
    if (coeffs.autonomous()) return find_steady_state(coeffs, params, options.steady);
    if (coeffs.period()) return find_periodic_entire_solution(coeffs, params, options.periodic);
    return pullback_entire_solution(coeffs, params, options.depths, options.pullback_unit, options.pullback);
}

}  // namespace kslab
