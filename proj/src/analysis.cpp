#include "kslab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kslab/elliptic.hpp"
#include "kslab/error.hpp"
#include "kslab/model.hpp"
#include "kslab/parallel.hpp"

namespace kslab {
namespace {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double rms = 0.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    LineFit f;
    f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    f.intercept = my - f.slope * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (f.intercept + f.slope * x[i]);
        ss += r * r;
    }
    f.rms = std::sqrt(ss / n);
    return f;
}

bool is_homogeneous(const EntireStats& st) { return st.grad_sup <= 1e-9 * std::max(1.0, st.u_sup); }

/// Rightmost crossing of the threshold in one row; fronts near either box edge are rejected.
double rightmost_crossing(const double* row, int n, const Grid& grid, double threshold, int margin) {
    double peak = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) peak = std::max(peak, row[i]);
    if (!(peak >= threshold)) throw NoFront("front_speed: max u is below the threshold");
    int right = n - 1;
    while (row[right] < threshold) --right;
    int left = 0;
    while (row[left] < threshold) ++left;
    if (right >= n - 1 - margin || left <= margin)
        throw BoxTooSmall("front_speed: front within " + std::to_string(margin) + " cells of the box edge");
    const double h = grid.spacing();
    return grid.coordinate(right) + h * (row[right] - threshold) / (row[right] - row[right + 1]);
}

}  // namespace

const char* to_string(FitStatus s) { return s == FitStatus::ok ? "ok" : "no_decay"; }

const char* to_string(LevelStatus s) { return s == LevelStatus::pass ? "pass" : "indeterminate"; }

RatioSeries ratio_series(const Trajectory& traj, const EntireSolution& sol, const Params& params) {
    if (traj.states.empty() || sol.states.empty()) throw PreconditionError("ratio_series: empty input");
    if (!(traj.front().u.grid() == sol.grid())) throw PreconditionError("ratio_series: grids differ");
    RatioSeries out;
    const bool steady = sol.representation == Representation::steady;
    for (const auto& s : traj.states) {
        const ScalarField up = sol.u_at(s.t);
        const ScalarField vp = steady ? sol.states.front().v : solve_helmholtz(up, params);
        double gu = 0.0, gv = 0.0;
        for (std::size_t k = 0; k < up.size(); ++k) {
            gu = std::max(gu, std::abs(s.u[k] / up[k] - 1.0));
            gv = std::max(gv, std::abs(s.v[k] / vp[k] - 1.0));
        }
        out.times.push_back(s.t);
        out.u_gap.push_back(gu);
        out.v_gap.push_back(gv);
    }
    return out;
}

DecayFit fit_decay_rate(const std::vector<double>& times, const std::vector<double>& series, double floor) {
    if (times.size() != series.size()) throw PreconditionError("fit_decay_rate: size mismatch");
    std::vector<double> t, y;
    for (std::size_t i = 0; i < series.size(); ++i)
        if (std::isfinite(series[i]) && series[i] > floor) {
            t.push_back(times[i]);
            y.push_back(std::log(series[i]));
        }
    DecayFit fit;
    if (t.size() < 3) return fit;
    const std::size_t keep = std::max<std::size_t>(3, (t.size() + 1) / 2);
    t.erase(t.begin(), t.end() - static_cast<long>(keep));
    y.erase(y.begin(), y.end() - static_cast<long>(keep));
    const auto line = least_squares(t, y);
    fit.alpha = -line.slope;
    fit.prefactor = std::exp(line.intercept);
    fit.residual = line.rms;
    fit.points = keep;
    fit.status = fit.alpha > 0.0 ? FitStatus::ok : FitStatus::no_decay;
    return fit;
}

ContractionReport contraction_factor(const EntireSolution& sol, const Params& params, const CoefficientField& coeffs,
                                     const EntireSolution* refined) {
    const auto st = compute_stats(sol.states);
    ContractionReport rep;
    rep.c0 = st.grad_sup;
    rep.homogeneous = is_homogeneous(st);
    rep.c1 = gradient_constant(rep.c0, st.u_inf, params);
    rep.rho = rep.homogeneous ? homogeneous_contraction_rho(coeffs, params)
                              : contraction_rho(rep.c1, st.u_inf, st.u_sup, coeffs, params);
    if (refined) rep.c0_error = std::abs(compute_stats(refined->states).grad_sup - rep.c0);
    return rep;
}

Chi0Result chi0_surrogate(const CoefficientField& coeffs, const Params& params, std::vector<double> chi_grid,
                          const Chi0Options& options) {
    if (chi_grid.empty()) throw PreconditionError("chi0_surrogate: empty chi grid");
    const double chi_max = coeffs.b_inf() / params.mu;
    for (double chi : chi_grid)
        if (!(chi > 0.0 && chi < chi_max))
            throw PreconditionError("chi0_surrogate: grid values must lie in (0, b_inf/mu)");
    std::sort(chi_grid.begin(), chi_grid.end());

    auto evaluate = [&](double chi) {
        const Params p = params.with_chi(chi);
        const auto sol = construct_entire_solution(coeffs, p, options.entire);
        if (!options.refine) return contraction_factor(sol, p, coeffs);
        const Params fine = p.with_grid_points(2 * p.grid_points);
        const auto sol_fine = construct_entire_solution(coeffs, fine, options.entire);
        return contraction_factor(sol, p, coeffs, &sol_fine);
    };

    Chi0Result res;
    res.chi_grid = chi_grid;
    res.grid_reports = parallel_map(chi_grid.size(), options.workers, [&](std::size_t i) { return evaluate(chi_grid[i]); });
    std::size_t good = 0;
    while (good < chi_grid.size() && res.grid_reports[good].rho < 1.0) ++good;
    if (good == 0) return res;
    if (good == chi_grid.size()) {
        res.chi0 = chi_grid.back();
        res.censored = true;
        return res;
    }
    double lo = chi_grid[good - 1], hi = chi_grid[good];
    while (hi - lo > options.tolerance) {
        const double mid = 0.5 * (lo + hi);
        (evaluate(mid).rho < 1.0 ? lo : hi) = mid;
    }
    res.chi0 = hi;
    return res;
}

std::vector<StaircaseLevel> staircase_check(const Trajectory& traj, const EntireSolution& sol, const Params& params,
                                            const CoefficientField& coeffs, int n_max) {
    if (n_max < 1) throw PreconditionError("staircase_check: n_max must be positive");
    const auto con = contraction_factor(sol, params, coeffs);
    if (!(con.rho < 1.0)) throw PreconditionError("staircase_check: contraction factor is not below 1");
    const auto st = compute_stats(sol.states);
    const auto series = ratio_series(traj, sol, params);
    const double gap = coeffs.b_inf() - params.chi * params.mu;
    const double eps = 0.01 * coeffs.a_sup() / gap;
    const double base = coeffs.a_sup() / (gap * (con.homogeneous ? st.u_inf : st.u_sup));

    std::vector<StaircaseLevel> levels;
    for (int n = 1; n <= n_max; ++n) {
        StaircaseLevel lv;
        lv.n = n;
        lv.bound = std::pow(con.rho, n) * base + eps;
        std::size_t k = series.u_gap.size();
        while (k > 0 && series.u_gap[k - 1] <= lv.bound) --k;
        if (k < series.u_gap.size()) {
            lv.status = LevelStatus::pass;
            lv.first_passage = series.times[k];
        }
        levels.push_back(lv);
    }
    return levels;
}

StabilityReport stability_report(const Trajectory& traj, const EntireSolution& sol, const Params& params,
                                 const CoefficientField& coeffs, int n_max) {
    StabilityReport rep;
    rep.series = ratio_series(traj, sol, params);
    rep.fit = fit_decay_rate(rep.series.times, rep.series.u_gap);
    rep.contraction = contraction_factor(sol, params, coeffs);
    if (rep.contraction.rho < 1.0) rep.levels = staircase_check(traj, sol, params, coeffs, n_max);
    return rep;
}

FrontMeasurement front_speed(const Trajectory& traj, double threshold, const FrontOptions& options) {
    if (traj.states.size() < 2) throw PreconditionError("front_speed: need at least two stored states");
    if (!(threshold > 0.0)) throw PreconditionError("front_speed: threshold must be positive");
    FrontMeasurement m;
    for (const auto& s : traj.states) {
        const Grid& g = s.u.grid();
        const double* row = s.u.data().data() + (g.dim == 2 ? static_cast<std::size_t>(g.points / 2) * g.points : 0);
        m.times.push_back(s.t);
        m.positions.push_back(rightmost_crossing(row, g.points, g, threshold, options.boundary_cells));
    }
    const double t_end = m.times.back();
    const double t_from = t_end - options.fit_fraction * (t_end - m.times.front());
    std::vector<double> t, x;
    for (std::size_t i = 0; i < m.times.size(); ++i)
        if (m.times[i] >= t_from - 1e-12) {
            t.push_back(m.times[i]);
            x.push_back(m.positions[i]);
        }
    if (t.size() < 2) throw PreconditionError("front_speed: too few stored states in the fit window");
    const auto line = least_squares(t, x);
    m.speed = line.slope;
    m.intercept = line.intercept;
    m.residual = line.rms;
    return m;
}

double default_front_threshold(const CoefficientField& coeffs, const Params& params) {
    if (validate_coefficients(coeffs, params).holds_h2) return 0.5 * attraction_rectangle(coeffs, params).lower;
    return coeffs.a_inf() / (4.0 * coeffs.b_sup());
}

bool PerturbationReport::complete() const {
    return std::all_of(rows.begin(), rows.end(), [](const PerturbationRow& r) { return r.error.empty(); });
}

double PerturbationReport::ratio_spread() const {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& r : rows)
        if (r.error.empty()) {
            lo = std::min(lo, r.ratio);
            hi = std::max(hi, r.ratio);
        }
    if (!(lo <= hi)) return std::numeric_limits<double>::quiet_NaN();
    return (hi - lo) / lo;
}

double entire_distance(const EntireSolution& a, const EntireSolution& b) {
    double d = 0.0;
    for (const auto& s : a.states) d = std::max(d, sup_distance(s.u, b.u_at(s.t)));
    return d;
}

PerturbationReport perturbation_study(const ScalarField& u0, const std::vector<double>& chi_list, double horizon,
                                      const CoefficientField& coeffs, const Params& params,
                                      const PerturbationOptions& options) {
    if (!(u0.min() > 0.0)) throw PreconditionError("perturbation_study: u0 must be strictly positive");
    const double chi_max = coeffs.b_inf() / params.mu;
    for (double chi : chi_list)
        if (!(chi > 0.0 && chi < chi_max))
            throw PreconditionError("perturbation_study: chi values must lie in (0, b_inf/mu)");

    const Params p0 = params.with_chi(0.0);
    const Trajectory base = integrate(u0, 0.0, horizon, coeffs, p0, options.integrator);
    PerturbationReport rep;
    std::optional<EntireSolution> sol0;
    if (options.with_entire) {
        sol0 = construct_entire_solution(coeffs, p0, options.entire);
        rep.K = perturbation_constant(sol0->stats.grad_log_sup, params);
        rep.uplus0_inf = sol0->stats.u_inf;
        rep.uplus0_sup = sol0->stats.u_sup;
    }

    rep.rows = parallel_map(chi_list.size(), options.workers, [&](std::size_t i) {
        PerturbationRow row;
        row.chi = chi_list[i];
        const Params p = params.with_chi(row.chi);
        try {
            const Trajectory tr = integrate(u0, 0.0, horizon, coeffs, p, options.integrator);
            for (std::size_t j = 0; j < tr.states.size(); ++j)
                row.gap = std::max(row.gap, sup_distance(tr.states[j].u, base.states[j].u));
            row.ratio = row.gap / row.chi;
            if (sol0) {
                const auto sol = construct_entire_solution(coeffs, p, options.entire);
                row.entire_gap = entire_distance(sol, *sol0);
                row.bound = perturbation_bound(row.chi, rep.K, rep.uplus0_inf, rep.uplus0_sup, coeffs, p);
                row.bound_holds = row.entire_gap <= row.bound;
            }
        } catch (const std::exception& e) {
            row.error = e.what();
            row.gap = row.ratio = std::numeric_limits<double>::quiet_NaN();
        }
        return row;
    });
    return rep;
}

}  // namespace kslab
