#include "kslab/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kslab/elliptic.hpp"
#include "kslab/error.hpp"
#include "kslab/log.hpp"
#include "kslab/model.hpp"
#include "kslab/spectral.hpp"

namespace kslab {
namespace {

constexpr double kSilentUndershoot = 1e-12;
constexpr double kFatalUndershoot = 1e-8;

double van_leer(double left, double right) {
    const double p = left * right;
    return p <= 0.0 ? 0.0 : 2.0 * p / (left + right);
}

/// Adds -d/dx(u w) along one periodic line; `stride` walks the line in memory.
void add_line_divergence(const double* u, const double* v, std::size_t stride, int n, double chi, double h,
                         double* rate, std::vector<double>& flux) {
    flux.resize(n);
    auto U = [&](int i) { return u[static_cast<std::size_t>((i + n) % n) * stride]; };
    auto V = [&](int i) { return v[static_cast<std::size_t>((i + n) % n) * stride]; };
    for (int i = 0; i < n; ++i) {
        const double w = chi * (V(i + 1) - V(i)) / h;
        if (w > 0.0) {
            const double ul = U(i) + 0.5 * van_leer(U(i) - U(i - 1), U(i + 1) - U(i));
            flux[i] = w * ul;
        } else {
            const double ur = U(i + 1) - 0.5 * van_leer(U(i + 1) - U(i), U(i + 2) - U(i + 1));
            flux[i] = w * ur;
        }
    }
    for (int i = 0; i < n; ++i)
        rate[static_cast<std::size_t>(i) * stride] -= (flux[i] - flux[(i - 1 + n) % n]) / h;
}

/// Largest |chi dv| / h over faces, summed over axes.
double face_speed_sum(const ScalarField& v, double chi) {
    const Grid& g = v.grid();
    const int n = g.points;
    const double h = g.spacing();
    double sum = 0.0;
    if (g.dim == 1) {
        double m = 0.0;
        for (int i = 0; i < n; ++i) m = std::max(m, std::abs(v[(i + 1) % n] - v[i]));
        return chi * m / h;
    }
    double mx = 0.0, my = 0.0;
    for (int iy = 0; iy < n; ++iy)
        for (int ix = 0; ix < n; ++ix) {
            mx = std::max(mx, std::abs(v.at(iy, (ix + 1) % n) - v.at(iy, ix)));
            my = std::max(my, std::abs(v.at((iy + 1) % n, ix) - v.at(iy, ix)));
        }
    sum = chi * (mx + my) / h;
    return sum;
}

void enforce_undershoot_policy(ScalarField& u, double t) {
    const double mn = u.min();
    if (mn >= 0.0) return;
    if (mn < -kFatalUndershoot) {
        std::ostringstream msg;
        msg << "positivity lost at t=" << t << ": min u = " << mn;
        throw PositivityLoss(msg.str(), t, mn);
    }
    if (mn < -kSilentUndershoot) {
        std::ostringstream msg;
        msg << "clamped undershoot " << mn << " at t=" << t;
        log::warn(msg.str());
    }
    for (double& x : u.data())
        if (x < 0.0) x = 0.0;
}

/// Exact heat flow over one half step. The spectral flow is not positivity
/// preserving on under-resolved data, so when it undershoots past what the
/// clamping policy tolerates it is blended with the exact flow of the central
/// difference Laplacian, whose off-diagonal entries are nonnegative. One global
/// weight keeps the mass, and the largest weight that leaves every node
/// nonnegative is used.
ScalarField diffuse(const ScalarField& u, const std::vector<double>& spectral, double tau) {
    ScalarField w = apply_multiplier(u, spectral);
    if (w.min() >= -kFatalUndershoot) return w;
    auto discrete = SpectralOps::for_grid(u.grid()).difference_symbol(u.grid().half_length);
    for (double& s : discrete) s = std::exp(-tau * s);
    const ScalarField safe = apply_multiplier(u, discrete);
    double theta = 1.0;
    for (std::size_t i = 0; i < w.size(); ++i)
        if (w[i] < 0.0) {
            const double s = std::max(safe[i], 0.0);
            theta = std::min(theta, s / (s - w[i]));
        }
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = theta * w[i] + (1.0 - theta) * safe[i];
    return w;
}

void react(ScalarField& u, const ScalarField& a, const ScalarField& b, double tau) {
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double ai = a[i];
        const double q = ai != 0.0 ? std::expm1(ai * tau) / ai : tau;  // (e^{a tau} - 1) / a
        const double growth = 1.0 + ai * q;
        u[i] = u[i] * growth / (1.0 + b[i] * u[i] * q);
    }
}

ScalarField transport(ScalarField u, double dt, const Params& params, double cfl, double t, int& substeps) {
    const double h = u.grid().spacing();
    double remaining = dt;
    while (remaining > 0.0) {
        const ScalarField v = solve_helmholtz(u, params);
        const double speed = face_speed_sum(v, params.chi);
        double tau = remaining;
        if (speed > 0.0) {
            const double limit = cfl * h / speed;
            const double m = std::ceil(remaining / limit - 1e-12);
            if (m > 1.0) tau = remaining / m;
        }
        ScalarField u1 = u;
        const ScalarField r0 = transport_rate(u, v, params.chi);
        for (std::size_t i = 0; i < u.size(); ++i) u1[i] += tau * r0[i];
        const ScalarField r1 = transport_rate(u1, solve_helmholtz(u1, params), params.chi);
        for (std::size_t i = 0; i < u.size(); ++i) u[i] = 0.5 * u[i] + 0.5 * (u1[i] + tau * r1[i]);
        enforce_undershoot_policy(u, t);
        remaining = (tau == remaining) ? 0.0 : remaining - tau;
        ++substeps;
    }
    return u;
}

}  // namespace

State make_state(ScalarField u, double t, const Params& params) {
    State s;
    s.t = t;
    s.v = solve_helmholtz(u, params);
    s.u = std::move(u);
    return s;
}

double Trajectory::max_sup_norm() const {
    double m = 0.0;
    for (const auto& s : states) m = std::max(m, s.u.max_abs());
    for (const auto& r : steps) m = std::max(m, r.max_u);
    return m;
}

ScalarField transport_rate(const ScalarField& u, const ScalarField& v, double chi) {
    const Grid& g = u.grid();
    ScalarField rate(g);
    if (chi == 0.0) return rate;
    const int n = g.points;
    const double h = g.spacing();
    std::vector<double> flux;
    if (g.dim == 1) {
        add_line_divergence(u.data().data(), v.data().data(), 1, n, chi, h, rate.data().data(), flux);
        return rate;
    }
    for (int iy = 0; iy < n; ++iy) {
        const std::size_t off = static_cast<std::size_t>(iy) * n;
        add_line_divergence(u.data().data() + off, v.data().data() + off, 1, n, chi, h, rate.data().data() + off, flux);
    }
    for (int ix = 0; ix < n; ++ix)
        add_line_divergence(u.data().data() + ix, v.data().data() + ix, static_cast<std::size_t>(n), n, chi, h,
                            rate.data().data() + ix, flux);
    return rate;
}

ScalarField rhs(const ScalarField& u, double t, const CoefficientField& coeffs, const Params& params) {
    const Grid& g = u.grid();
    ScalarField out = laplacian(u);
    out += transport_rate(u, solve_helmholtz(u, params), params.chi);
    const ScalarField a = coeffs.sample_grid(Which::a, g, t);
    const ScalarField b = coeffs.sample_grid(Which::b, g, t);
    for (std::size_t i = 0; i < u.size(); ++i) out[i] += u[i] * (a[i] - b[i] * u[i]);
    return out;
}

State step(const State& state, double dt, const CoefficientField& coeffs, const Params& params,
           const StepOptions& options, StepRecord* record) {
    if (!(dt > 0.0)) throw PreconditionError("step: dt must be positive");
    const Grid& grid = state.u.grid();
    const double t = state.t;
    const auto& ops = SpectralOps::for_grid(grid);
    auto heat = ops.wavenumber_squared(grid.half_length);
    for (double& k2 : heat) k2 = std::exp(-0.5 * dt * k2);

    ScalarField a(grid), b(grid);
    int substeps = 0;

    ScalarField u = diffuse(state.u, heat, 0.5 * dt);
    enforce_undershoot_policy(u, t);

    coeffs.fill(Which::a, grid, t + 0.25 * dt, a);
    coeffs.fill(Which::b, grid, t + 0.25 * dt, b);
    react(u, a, b, 0.5 * dt);

    if (params.chi != 0.0) u = transport(std::move(u), dt, params, options.cfl, t, substeps);

    coeffs.fill(Which::a, grid, t + 0.75 * dt, a);
    coeffs.fill(Which::b, grid, t + 0.75 * dt, b);
    react(u, a, b, 0.5 * dt);

    u = diffuse(u, heat, 0.5 * dt);
    enforce_undershoot_policy(u, t + dt);

    const double mx = u.max();
    if (options.noise_floor > 0.0) {
        const double floor = options.noise_floor * mx;
        for (double& x : u.data())
            if (x < floor) x = 0.0;
    }
    if (!(mx <= options.blowup_ceiling)) {
        std::ostringstream msg;
        msg << "blow-up detected at t=" << t + dt << ": ||u|| = " << mx << " exceeds " << options.blowup_ceiling;
        throw BlowupDetected(msg.str(), t + dt, mx);
    }
    if (record) {
        record->t = t + dt;
        record->dt = dt;
        record->min_u = u.min();
        record->max_u = mx;
        record->transport_substeps = substeps;
    }
    return make_state(std::move(u), t + dt, params);
}

Trajectory integrate(const ScalarField& u0, double t0, double horizon, const CoefficientField& coeffs,
                     const Params& params, const IntegratorOptions& options) {
    params.validate();
    coeffs.require_positive_bounded();
    const Grid grid = params.grid();
    if (!(u0.grid() == grid)) throw PreconditionError("integrate: initial field is not on the Params grid");
    coeffs.require_box_compatible(grid);
    if (!u0.all_finite() || u0.min() < 0.0) throw PreconditionError("integrate: u0 must be finite and nonnegative");
    if (!(horizon >= 0.0)) throw PreconditionError("integrate: horizon must be >= 0");
    if (!(options.dt_max > 0.0) || options.store_every < 1) throw PreconditionError("integrate: bad options");

    StepOptions so = options.step;
    const auto hyp = validate_coefficients(coeffs, params);
    if (!hyp.holds_h1) {
        log::warn("integrate: (H1) fails; solutions may blow up");
    } else if (options.check_blowup) {
        so.blowup_ceiling = 10.0 * std::max(u0.max_abs(), sup_bound(coeffs, params));
    }

    Trajectory traj;
    traj.states.push_back(make_state(u0, t0, params));
    if (horizon == 0.0) return traj;

    const long n = static_cast<long>(std::ceil(horizon / options.dt_max - 1e-9));
    traj.steps.reserve(n);
    State cur = traj.states.front();
    for (long j = 1; j <= n; ++j) {
        const double target = j == n ? t0 + horizon : t0 + horizon * static_cast<double>(j) / static_cast<double>(n);
        const double dt = target - cur.t;
        StepRecord rec;
        State next;
        try {
            next = step(cur, dt, coeffs, params, so, &rec);
        } catch (const PositivityLoss& first) {
            bool done = false;
            for (int r = 1; r <= options.max_retries && !done; ++r) {
                const int m = 1 << r;
                try {
                    State s = cur;
                    int substeps = 0;
                    double mn = 0.0, mx = 0.0;
                    for (int k = 0; k < m; ++k) {
                        StepRecord sub;
                        s = step(s, dt / m, coeffs, params, so, &sub);
                        substeps += sub.transport_substeps;
                        mn = k == 0 ? sub.min_u : std::min(mn, sub.min_u);
                        mx = std::max(mx, sub.max_u);
                    }
                    next = std::move(s);
                    rec = StepRecord{target, dt, mn, mx, substeps};
                    done = true;
                    std::ostringstream msg;
                    msg << "step at t=" << cur.t << " retried with " << m << " sub-steps";
                    log::info(msg.str());
                } catch (const PositivityLoss&) {
                    if (r == options.max_retries) throw;
                }
            }
            if (!done) throw first;
        } catch (const BlowupDetected&) {
            throw;
        } catch (const Error& e) {
            std::ostringstream msg;
            msg << e.what() << " (integrating from t=" << cur.t << ")";
            throw Error(msg.str());
        }
        next.t = target;
        rec.t = target;
        traj.steps.push_back(rec);
        if (j % options.store_every == 0 || j == n) traj.states.push_back(next);
        cur = std::move(next);
    }
    return traj;
}

double mild_residual(const Trajectory& traj, double sample_t, const CoefficientField& coeffs, const Params& params,
                     double window) {
    const auto& states = traj.states;
    if (states.empty()) throw PreconditionError("mild_residual: empty trajectory");
    const double slack = 1e-9 * std::max(1.0, std::abs(sample_t));
    if (sample_t < states.front().t - slack || sample_t > states.back().t + slack)
        throw PreconditionError("mild_residual: sample time outside the trajectory");
    std::size_t i1 = 0;
    while (i1 + 1 < states.size() && states[i1 + 1].t <= sample_t + slack) ++i1;
    std::size_t i0 = i1;
    while (i0 > 0 && states[i0 - 1].t >= states[i1].t - window - slack) --i0;
    if (i1 - i0 + 1 < 3) throw PreconditionError("mild_residual: insufficient stored states in the window");

    const Grid& grid = states[i1].u.grid();
    const auto& ops = SpectralOps::for_grid(grid);
    auto sigma = ops.wavenumber_squared(grid.half_length);
    for (double& s : sigma) s = -(s + 1.0);
    const double t1 = states[i1].t;

    // Forcing G = -chi div(u grad v) + (a + 1 - b u) u at each stored time.
    std::vector<std::vector<Complex>> forcing;
    ScalarField a(grid), b(grid);
    for (std::size_t j = i0; j <= i1; ++j) {
        const State& s = states[j];
        ScalarField g = transport_rate(s.u, s.v, params.chi);
        coeffs.fill(Which::a, grid, s.t, a);
        coeffs.fill(Which::b, grid, s.t, b);
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += (a[i] + 1.0 - b[i] * s.u[i]) * s.u[i];
        forcing.push_back(ops.forward(g.values()));
    }

    // phi_near = int_0^1 e^{z th} th, phi_far = int_0^1 e^{z th} (1 - th).
    auto weights = [](double z, double& near, double& far) {
        if (std::abs(z) < 1e-4) {
            near = 0.5 + z / 3.0 + z * z / 8.0 + z * z * z / 30.0;
            far = 0.5 + z / 6.0 + z * z / 24.0 + z * z * z / 120.0;
        } else {
            const double ez = std::exp(z);
            near = (ez * (z - 1.0) + 1.0) / (z * z);
            far = (std::expm1(z) - z) / (z * z);
        }
    };

    auto result = ops.forward(states[i0].u.values());
    const double span = t1 - states[i0].t;
    for (std::size_t k = 0; k < result.size(); ++k) result[k] *= std::exp(sigma[k] * span);
    for (std::size_t j = i0; j < i1; ++j) {
        const double left = states[j].t;
        const double right = states[j + 1].t;
        const double delta = right - left;
        const double tau0 = t1 - right;
        const auto& g_left = forcing[j - i0];
        const auto& g_right = forcing[j + 1 - i0];
        for (std::size_t k = 0; k < result.size(); ++k) {
            double near, far;
            weights(sigma[k] * delta, near, far);
            // The left node sits at distance rho = delta from `right`.
            result[k] += std::exp(sigma[k] * tau0) * delta * (near * g_left[k] + far * g_right[k]);
        }
    }
    ScalarField duhamel(grid);
    ops.inverse(result, duhamel.values());
    return sup_distance(duhamel, states[i1].u);
}

}  // namespace kslab
