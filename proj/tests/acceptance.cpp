/**
 * @file acceptance.cpp
 * @brief End-to-end acceptance run: one PASS/FAIL line per criterion.
 *
 * Exit status is the number of failed criteria.
 */
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "kslab/analysis.hpp"
#include "kslab/config.hpp"
#include "kslab/elliptic.hpp"
#include "kslab/entire.hpp"
#include "kslab/evolve.hpp"
#include "kslab/model.hpp"
#include "kslab/oracles.hpp"
#include "support.hpp"

using namespace kslab;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

/// Accumulates named sub-checks; the verdict passes when all of them do.
class Checks {
public:
    void expect(bool ok, const std::string& what) {
        if (!ok) failures_.push_back(what);
    }
    void note(const std::string& s) { notes_ += (notes_.empty() ? "" : "; ") + s; }
    Verdict verdict() const {
        std::string d = notes_;
        for (const auto& f : failures_) d += (d.empty() ? "" : "; ") + ("FAILED " + f);
        return {failures_.empty(), d};
    }

private:
    std::vector<std::string> failures_;
    std::string notes_;
};

std::string fmt(double x, int digits = 4) {
    std::ostringstream s;
    s.precision(digits);
    s << x;
    return s.str();
}

IntegratorOptions stepping(double dt, int store_every) {
    IntegratorOptions o;
    o.dt_max = dt;
    o.store_every = store_every;
    return o;
}

ScalarField random_band(const Grid& g, std::uint64_t seed, double lo, double hi, int modes = 8) {
    InitialSpec s;
    s.kind = InitialSpec::Kind::random_band;
    s.seed = seed;
    s.lo = lo;
    s.hi = hi;
    s.modes = modes;
    return build_initial(s, g);
}

ScalarField gaussian_bump(const Grid& g, double height, double radius) {
    InitialSpec s;
    s.kind = InitialSpec::Kind::bump;
    s.value = height;
    s.radius = radius;
    return build_initial(s, g);
}

Params params(double chi, double L, int n) { return test::params_1d(chi, L, n); }

// Closed forms against values written out by hand.
Verdict closed_form_oracles() {
    Checks c;
    double worst = 0.0;
    auto same = [&](double got, double want, const std::string& what) {
        const double rel = std::abs(got - want) / std::max(std::abs(want), 1e-300);
        worst = std::max(worst, rel);
        c.expect(rel <= 1e-10, what + " = " + fmt(got, 17) + " vs " + fmt(want, 17));
    };
    const auto one = CoefficientField::constant(1, 1);
    const auto p02 = params(0.2, 10, 64);
    const auto het = test::heterogeneous_a(std::numbers::pi / 10);
    const auto p01 = params(0.1, 10, 64);

    const auto rect0 = attraction_rectangle(one, p02);
    same(rect0.lower, 1.0, "M_lower (constant)");
    same(rect0.upper, 1.0, "M_upper (constant)");
    const auto rect = attraction_rectangle(het, p01);
    same(rect.lower, (1.0 - 0.1 * 2.125) / 0.9, "M_lower (a in [1,2])");
    same(rect.lower, 0.875, "M_lower value");
    same(rect.upper, (2.0 - 0.1 * 0.875) / 0.9, "M_upper (a in [1,2])");
    same(rect.upper, 2.125, "M_upper value");
    same(sup_bound(one, p02), 1.0 / 0.8, "sup bound");
    same(sup_bound(het, p01), 2.0 / 0.9, "sup bound (a in [1,2])");

    const auto speeds = spreading_speeds(one, p02);
    same(speeds.c_plus_star, 2.0 + 0.2 / (2.0 * 0.8), "c+*");
    same(speeds.c_minus_star, 2.0 * std::sqrt(1.0 - 0.25) - 0.125, "c-*");
    const auto fk = spreading_speeds(one, params(0.0, 10, 64));
    same(fk.c_plus_star, 2.0, "c+* (chi = 0)");
    same(fk.c_minus_star, 2.0, "c-* (chi = 0)");

    same(lower_bound_threshold(1.0, one), std::exp(-1.0), "M_T");
    same(pointwise_lower_bound(0.5, 0.5, 1.0, 1.0, one), 0.5 * std::exp(1.0 - 0.5 * std::exp(1.0)), "pointwise lower bound");
    same(dirichlet_principal_eigenvalue(std::numbers::pi / 2, 0.0, 1), 1.0, "sigma_L (N=1)");
    same(dirichlet_principal_eigenvalue(1.0, 1.0 / 3.0, 2), 2.0 * std::pow(std::numbers::pi / 2, 2) - 1.0 / 3.0,
         "sigma_L (N=2)");
    same(homogeneous_contraction_rho(one, p02), 0.25, "rho");
    same(contraction_rho(gradient_constant(0.0, 1.0, p02), 1.0, 1.0, one, p02), 0.25, "rho via C1");
    const double K = perturbation_constant(0.0, p02);
    same(K, 2.0, "K");
    same(perturbation_bound(0.2, K, 1.0, 1.0, one, p02), 2.0 * 0.2 / (1.0 * 0.8), "perturbation bound");
    c.note("max relative error " + fmt(worst, 3));
    return c.verdict();
}

Verdict global_existence_bounds() {
    Checks c;
    const auto coeffs = CoefficientField::constant(1, 1);
    const auto p = params(0.2, 10, 256);
    std::mt19937_64 rng(2024);
    double worst_sup = -1e300, worst_env = -1e300;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const double lo = test::uniform(rng, 0.01, 0.5), hi = test::uniform(rng, 0.6, 3.0);
        const auto u0 = random_band(p.grid(), seed, lo, hi);
        const auto tr = integrate(u0, 0.0, 10.0, coeffs, p, stepping(0.01, 100));
        const double n0 = u0.max_abs();
        for (const auto& s : tr.steps) {
            worst_sup = std::max(worst_sup, s.max_u - (std::max(n0, 1.25) + 1e-6));
            worst_env = std::max(worst_env, s.max_u - (n0 * std::exp(s.t) + 1e-6));
        }
        for (const auto& st : tr.states) c.expect(st.u.min() >= 0.0, "positivity, seed " + std::to_string(seed));
    }
    c.expect(worst_sup <= 0.0, "max{||u0||, 1.25} + 1e-6 bound");
    c.expect(worst_env <= 0.0, "||u0|| e^t envelope");
    c.note("20 runs; worst margin to sup bound " + fmt(-worst_sup) + ", to envelope " + fmt(-worst_env));
    return c.verdict();
}

Verdict attraction_rectangle_run() {
    Checks c;
    const double L = 50.0;
    const auto coeffs = test::heterogeneous_a(std::numbers::pi / L);
    const auto p = params(0.1, L, 4096);
    const auto u0 = random_band(p.grid(), 17, 0.1, 3.0);
    const double burn_in = 20.0;
    const auto tr = integrate(u0, 0.0, 40.0, coeffs, p, stepping(0.01, 100));
    double lo = 1e300, hi = -1e300;
    for (const auto& s : tr.steps)
        if (s.t >= burn_in) {
            lo = std::min(lo, s.min_u);
            hi = std::max(hi, s.max_u);
        }
    c.expect(lo >= 0.855, "lower edge 0.855 (observed " + fmt(lo, 6) + ")");
    c.expect(hi <= 2.145, "upper edge 2.145 (observed " + fmt(hi, 6) + ")");
    c.note("u in [" + fmt(lo, 6) + ", " + fmt(hi, 6) + "] for t in [20, 40]");
    return c.verdict();
}

Verdict entire_solutions() {
    Checks c;
    int certified = 0, constructed = 0;
    auto certify = [&](const EntireSolution& sol, const CoefficientField& coeffs, const Params& p, const std::string& w) {
        ++constructed;
        const auto rep = certify_entire_bounds(sol, coeffs, p);
        c.expect(rep.all_pass(), "certification of " + w);
        if (rep.all_pass()) ++certified;
    };

    // Constant coefficients, steady and periodic routes.
    const auto cst = CoefficientField::constant(2.0, 1.5);
    const auto pc = params(0.2, 10, 64);
    const auto steady = construct_entire_solution(cst, pc);
    double err = std::max(std::abs(steady.stats.u_inf - 4.0 / 3.0), std::abs(steady.stats.u_sup - 4.0 / 3.0));
    c.expect(err <= 1e-9, "constant case a/b (steady), error " + fmt(err));
    certify(steady, cst, pc, "constant steady");
    const CoefficientField cst_t(ConstantProfile{2.0}, ConstantProfile{1.5}, 0.7);
    PeriodicOptions po_c;
    po_c.dt_max = 0.01;
    po_c.slices = 10;
    const auto cper = find_periodic_entire_solution(cst_t, pc, po_c);
    const double err_p = std::max(std::abs(cper.stats.u_inf - 4.0 / 3.0), std::abs(cper.stats.u_sup - 4.0 / 3.0));
    c.expect(err_p <= 1e-9, "constant case a/b (periodic), error " + fmt(err_p));
    certify(cper, cst_t, pc, "constant periodic");

    // Heterogeneous steady state with chemotaxis.
    const auto het = test::heterogeneous_a(1.0);
    const auto ph = params(0.1, std::numbers::pi, 128);
    certify(find_steady_state(het, ph), het, ph, "heterogeneous steady");

    // Space-time heterogeneous, time-periodic coefficients.
    SeparableProfile a{1.0, {Harmonic{0.5, {0, 0}, 0, 2 * std::numbers::pi, -std::numbers::pi / 2},
                             Harmonic{0.2, {0.5, 0}, 0, 0, 0}}};
    const CoefficientField per_c(a, ConstantProfile{1.0}, 1.0);
    const auto pp = params(0.1, 2 * std::numbers::pi, 32);
    PeriodicOptions po;
    po.dt_max = 0.002;
    po.slices = 50;
    const auto per = find_periodic_entire_solution(per_c, pp, po);
    c.expect(per.converged && per.defect < 1e-7, "Poincare displacement < 1e-7 (got " + fmt(per.defect) + ")");
    certify(per, per_c, pp, "periodic");
    PullbackOptions pb;
    pb.dt_max = 0.002;
    pb.slices = 50;
    const auto pull = pullback_entire_solution(per_c, pp, {10, 20, 30}, 1.0, pb);
    double agree = 0.0;
    for (double s : {0.0, -0.25, -0.5, -0.75}) agree = std::max(agree, sup_distance(pull.u_at(s), per.u_at(s + 1.0)));
    c.expect(pull.converged && agree < 1e-5, "pullback agreement < 1e-5 (got " + fmt(agree) + ")");
    certify(pull, per_c, pp, "pullback");

    c.note("constant error " + fmt(std::max(err, err_p)) + ", displacement " + fmt(per.defect) + ", pullback gap " +
           fmt(agree) + ", certified " + std::to_string(certified) + "/" + std::to_string(constructed));
    return c.verdict();
}

Verdict exponential_stability() {
    Checks c;
    const auto coeffs = CoefficientField::constant(1, 1);
    const auto p = params(0.2, 10, 64);
    const auto sol = construct_entire_solution(coeffs, p);
    double min_alpha = 1e300, max_gap = 0.0;
    int levels_ok = 0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto u0 = random_band(p.grid(), 100 + seed, 0.2, 1.8);
        const auto tr = integrate(u0, 0.0, 30.0, coeffs, p, stepping(0.01, 10));
        const auto rep = stability_report(tr, sol, p, coeffs, 3);
        const std::string tag = " (seed " + std::to_string(100 + seed) + ")";
        c.expect(rep.fit.status == FitStatus::ok && rep.fit.alpha > 0.0, "fitted rate positive" + tag);
        c.expect(rep.series.u_gap.back() < 1e-4, "final ||U - 1|| < 1e-4" + tag);
        bool all = rep.levels.size() == 3;
        for (const auto& l : rep.levels) all = all && l.status == LevelStatus::pass;
        c.expect(all, "staircase levels 1..3" + tag);
        levels_ok += all;
        min_alpha = std::min(min_alpha, rep.fit.alpha);
        max_gap = std::max(max_gap, rep.series.u_gap.back());
    }
    const auto homog = integrate(ScalarField(p.grid(), 1.2), 0.0, 30.0, coeffs, p, stepping(0.01, 10));
    const auto hrep = stability_report(homog, sol, p, coeffs, 3);
    c.expect(std::abs(hrep.fit.alpha - 1.0) <= 0.05, "homogeneous rate 1 +- 0.05 (got " + fmt(hrep.fit.alpha, 6) + ")");
    c.note("min rate " + fmt(min_alpha) + ", max final gap " + fmt(max_gap) + ", homogeneous rate " +
           fmt(hrep.fit.alpha, 6) + ", staircase ok in " + std::to_string(levels_ok) + "/5");
    return c.verdict();
}

Verdict spreading_sandwich() {
    Checks c;
    const auto coeffs = CoefficientField::constant(1, 1);
    double speeds[2] = {0, 0};
    for (int k = 0; k < 2; ++k) {
        const auto p = params(k == 0 ? 0.0 : 0.2, 400, 8192);
        const auto tr = integrate(gaussian_bump(p.grid(), 1.0, 4.0), 0.0, 80.0, coeffs, p, stepping(0.01, 20));
        speeds[k] = front_speed(tr, default_front_threshold(coeffs, p)).speed;
    }
    c.expect(std::abs(speeds[0] - 2.0) <= 0.15, "Fisher-KPP speed 2 +- 0.15");
    const auto oracle = spreading_speeds(coeffs, params(0.2, 400, 8192));
    c.expect(oracle.c_minus_applicable && oracle.slack_h3 > 0.0, "spreading hypothesis holds at chi = 0.2");
    const double lo = oracle.c_minus_star - 0.2, hi = oracle.c_plus_star + 0.2;
    c.expect(speeds[1] >= lo && speeds[1] <= hi, "chi = 0.2 speed in [" + fmt(lo) + ", " + fmt(hi) + "]");
    c.note("speed " + fmt(speeds[0], 6) + " at chi = 0, " + fmt(speeds[1], 6) + " at chi = 0.2 in [" + fmt(lo) + ", " +
           fmt(hi) + "]");
    return c.verdict();
}

Verdict perturbation_linearity() {
    Checks c;
    const auto coeffs = test::heterogeneous_a(std::numbers::pi / 10);
    const auto p = params(0.0, 10, 128);
    PerturbationOptions o;
    o.integrator = stepping(0.01, 10);
    const auto rep = perturbation_study(random_band(p.grid(), 7, 0.3, 1.5), {0.05, 0.1, 0.2}, 10.0, coeffs, p, o);
    c.expect(rep.complete(), "all chi values ran");
    c.expect(rep.ratio_spread() < 0.25, "gap/chi spread < 25%");
    std::string gaps;
    for (const auto& r : rep.rows) {
        c.expect(r.bound_holds, "entire gap <= bound at chi = " + fmt(r.chi));
        gaps += " " + fmt(r.entire_gap, 3) + "<=" + fmt(r.bound, 3);
    }
    c.note("K = " + fmt(rep.K, 6) + ", spread " + fmt(100 * rep.ratio_spread(), 3) + "%, entire gaps" + gaps);
    return c.verdict();
}

Verdict property_suites() {
    Checks c;
    std::mt19937_64 rng(808);
    int violations[5] = {0, 0, 0, 0, 0}, instances[5] = {0, 0, 0, 0, 0};
    const auto one = CoefficientField::constant(1, 1);

    for (int i = 0; i < 100; ++i, ++instances[0]) {  // positivity
        const auto p = params(test::uniform(rng, 0, 0.45), test::uniform(rng, 5, 20), 64);
        const auto u0 = i % 2 ? test::random_rough_field(p.grid(), rng, 0, test::uniform(rng, 0.1, 3))
                              : test::random_smooth_field(p.grid(), rng, 0, test::uniform(rng, 0.1, 3));
        const auto tr = integrate(u0, 0, 1.0, one, p, stepping(0.02, 1));
        for (const auto& s : tr.states)
            if (!(s.u.min() >= 0.0)) {
                ++violations[0];
                break;
            }
    }
    const auto het = test::heterogeneous_a(std::numbers::pi / 10);
    for (int i = 0; i < 100; ++i, ++instances[1]) {  // chi = 0 ordering
        const auto p = params(0.0, 10, 64);
        const auto lo = test::random_rough_field(p.grid(), rng, 0, 1);
        ScalarField hi = lo;
        hi += test::random_smooth_field(p.grid(), rng, 0, test::uniform(rng, 0.01, 1));
        const auto a = integrate(lo, 0, 1.0, het, p, stepping(0.05, 5));
        const auto b = integrate(hi, 0, 1.0, het, p, stepping(0.05, 5));
        bool ok = true;
        for (std::size_t s = 0; s < a.states.size(); ++s)
            for (std::size_t k = 0; k < lo.size(); ++k) ok = ok && b.states[s].u[k] - a.states[s].u[k] >= -1e-13;
        violations[1] += !ok;
    }
    for (int i = 0; i < 100; ++i, ++instances[2]) {  // Helmholtz gradient bound
        auto p = params(0.0, test::uniform(rng, 2, 20), 128);
        p.lambda = test::uniform(rng, 0.1, 5);
        p.mu = test::uniform(rng, 0.1, 5);
        if (i % 3 == 0) {
            p.dim = 2;
            p.grid_points = 32;
        }
        const auto u = i % 2 ? test::random_rough_field(p.grid(), rng, 0, 3) : test::random_smooth_field(p.grid(), rng, 0, 3);
        const double bound = p.mu * std::sqrt(double(p.dim)) / std::sqrt(p.lambda) * u.max_abs();
        violations[2] += !(gradient(solve_helmholtz(u, p)).max_norm() <= bound * (1 + 1e-12));
    }
    for (int i = 0; i < 100; ++i, ++instances[3]) {  // linearity
        const auto p = test::params_1d(0, 8, 256, 0.7, 1.3);
        const auto u1 = test::random_rough_field(p.grid(), rng, -1, 1);
        const auto u2 = test::random_smooth_field(p.grid(), rng, -2, 2);
        const double al = test::uniform(rng, -3, 3), be = test::uniform(rng, -3, 3);
        const auto lhs = solve_helmholtz(al * u1 + be * u2, p);
        const auto rhs = al * solve_helmholtz(u1, p) + be * solve_helmholtz(u2, p);
        violations[3] += !(sup_distance(lhs, rhs) <= 1e-12 * std::max(1.0, rhs.max_abs()));
    }
    for (int i = 0; i < 100; ++i, ++instances[4]) {  // pointwise lower bound
        const auto p = params(test::uniform(rng, 0, 0.3), 2 * std::numbers::pi, 64);
        const auto coeffs = i % 2 ? CoefficientField::constant(test::uniform(rng, 0.5, 2), test::uniform(rng, 1, 2))
                                  : test::heterogeneous_a(0.5);
        const auto u0 =
            test::random_smooth_field(p.grid(), rng, test::uniform(rng, 0.05, 0.5), test::uniform(rng, 0.6, 2));
        const double T = test::uniform(rng, 0.2, 1.0);
        const auto tr = integrate(u0, 0, T, coeffs, p, stepping(0.02, 5));
        bool ok = true;
        for (const auto& s : tr.states) ok = ok && s.u.min() >= pointwise_lower_bound(u0.min(), u0.max(), T, s.t, coeffs) - 1e-6;
        violations[4] += !ok;
    }
    const char* names[5] = {"positivity", "ordering", "gradient bound", "linearity", "lower bound"};
    std::string summary;
    for (int k = 0; k < 5; ++k) {
        c.expect(instances[k] >= 100 && violations[k] == 0, names[k]);
        summary += std::string(k ? ", " : "") + names[k] + " " + std::to_string(violations[k]) + "/" +
                   std::to_string(instances[k]);
    }
    c.note("violations: " + summary);
    return c.verdict();
}

struct Criterion {
    int id;
    const char* name;
    double time_limit;  // seconds
    std::function<Verdict()> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "closed-form oracles", 1.0, closed_form_oracles},
        {2, "global existence bounds", 120.0, global_existence_bounds},
        {3, "attraction rectangle", 300.0, attraction_rectangle_run},
        {4, "entire solutions", 600.0, entire_solutions},
        {5, "exponential stability", 600.0, exponential_stability},
        {6, "spreading sandwich", 900.0, spreading_sandwich},
        {7, "perturbation linearity", 600.0, perturbation_linearity},
        {8, "property suites", 600.0, property_suites},
    };
    int failed = 0;
    for (const auto& cr : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = cr.run();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (secs > cr.time_limit) {
            v.pass = false;
            v.detail += "; FAILED time limit " + fmt(cr.time_limit) + " s";
        }
        failed += !v.pass;
        std::printf("%s %d %s: %s [%.2f s]\n", v.pass ? "PASS" : "FAIL", cr.id, cr.name, v.detail.c_str(), secs);
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed;
}
