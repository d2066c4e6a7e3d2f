#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "kslab/elliptic.hpp"
#include "kslab/error.hpp"
#include "support.hpp"

using namespace kslab;

TEST_CASE("Helmholtz solve on single modes") {
    const auto p = test::params_1d(0.0, std::numbers::pi, 128, 1.0, 2.0);
    const Grid g = p.grid();
    ScalarField c(g, 0.7);
    const auto vc = solve_helmholtz(c, p);
    for (double x : vc.values()) CHECK(std::abs(x - 2.0 * 0.7) < 1e-14);

    ScalarField u(g);
    for_each_node(g, [&](std::size_t k, double x, double) { u[k] = std::cos(3 * x); });
    const auto v = solve_helmholtz(u, p);
    double err = 0;
    for_each_node(g, [&](std::size_t k, double x, double) { err = std::max(err, std::abs(v[k] - 0.2 * std::cos(3 * x))); });
    CHECK(err < 1e-14);

    const auto z = solve_helmholtz(ScalarField(g), p);
    CHECK(z.max_abs() == 0.0);

    ScalarField bad(g);
    bad[3] = std::nan("");
    CHECK_THROWS_AS(solve_helmholtz(bad, p), PreconditionError);
}

TEST_CASE("spectral gradient") {
    const Grid g{1, 128, std::numbers::pi};
    ScalarField s(g), c3(g);
    for_each_node(g, [&](std::size_t k, double x, double) {
        s[k] = std::sin(x);
        c3[k] = std::cos(3 * x);
    });
    const auto ds = gradient(s).components[0];
    const auto dc = gradient(c3).components[0];
    double e1 = 0, e2 = 0;
    for_each_node(g, [&](std::size_t k, double x, double) {
        e1 = std::max(e1, std::abs(ds[k] - std::cos(x)));
        e2 = std::max(e2, std::abs(dc[k] + 3 * std::sin(3 * x)));
    });
    CHECK(e1 < 1e-10);
    CHECK(e2 < 1e-10);
    CHECK(gradient(ScalarField(g, 4.0)).max_norm() < 1e-14);

    const Grid g2{2, 32, std::numbers::pi};
    ScalarField f(g2);
    for_each_node(g2, [&](std::size_t k, double x, double y) { f[k] = std::sin(x) * std::cos(2 * y); });
    const auto grad = gradient(f);
    double e3 = 0;
    for_each_node(g2, [&](std::size_t k, double x, double y) {
        e3 = std::max(e3, std::abs(grad.components[0][k] - std::cos(x) * std::cos(2 * y)));
        e3 = std::max(e3, std::abs(grad.components[1][k] + 2 * std::sin(x) * std::sin(2 * y)));
    });
    CHECK(e3 < 1e-10);
}

namespace {
void check_solve_properties(const ScalarField& u, const Params& p, double& worst_grad_ratio) {
    const auto v = solve_helmholtz(u, p);
    const double nu = u.max_abs();
    CHECK(helmholtz_residual(u, v, p) <= 1e-10 * p.mu * nu);
    CHECK(p.lambda * v.max_abs() <= p.mu * nu * (1 + 1e-12));
    CHECK(v.min() >= -1e-12 * p.mu * nu / p.lambda);
    const double grad = gradient(v).max_norm();
    const double bound = p.mu * std::sqrt(static_cast<double>(p.dim)) / std::sqrt(p.lambda) * nu;
    CHECK(grad <= bound);
    worst_grad_ratio = std::max(worst_grad_ratio, grad / bound);
}
}  // namespace

TEST_CASE("property: residual, maximum principle and gradient bound on random data") {
    std::mt19937_64 rng(11);
    double worst = 0;
    int instances = 0;
    for (int trial = 0; trial < 60; ++trial) {
        auto p = test::params_1d(0.0, test::uniform(rng, 2, 20), 128, test::uniform(rng, 0.1, 5), test::uniform(rng, 0.1, 5));
        p.dim = trial % 3 == 0 ? 2 : 1;
        if (p.dim == 2) p.grid_points = 32;
        const Grid g = p.grid();
        check_solve_properties(test::random_smooth_field(g, rng, 0.0, test::uniform(rng, 0.1, 3)), p, worst);
        check_solve_properties(test::random_rough_field(g, rng, 0.0, test::uniform(rng, 0.1, 3)), p, worst);
        instances += 2;
    }
    CHECK(instances >= 100);
    MESSAGE("largest ||grad v|| / (mu sqrt(N)/sqrt(lambda) ||u||) observed: " << worst);
}

TEST_CASE("property: linearity of the solve") {
    std::mt19937_64 rng(12);
    const auto p = test::params_1d(0, 8, 256, 0.7, 1.3);
    for (int trial = 0; trial < 100; ++trial) {
        const auto u1 = test::random_rough_field(p.grid(), rng, -1, 1);
        const auto u2 = test::random_smooth_field(p.grid(), rng, -2, 2);
        const double al = test::uniform(rng, -3, 3), be = test::uniform(rng, -3, 3);
        const auto lhs = solve_helmholtz(al * u1 + be * u2, p);
        const auto rhs = al * solve_helmholtz(u1, p) + be * solve_helmholtz(u2, p);
        CHECK(sup_distance(lhs, rhs) <= 1e-12 * std::max(1.0, rhs.max_abs()));
    }
}

TEST_CASE("heat semigroup and shifted inverse") {
    const Grid g{1, 64, std::numbers::pi};
    ScalarField u(g);
    for_each_node(g, [&](std::size_t k, double x, double) { u[k] = 1 + std::cos(2 * x); });
    const auto h = heat_semigroup(u, 0.5, 1.0);
    double err = 0;
    for_each_node(g, [&](std::size_t k, double x, double) {
        err = std::max(err, std::abs(h[k] - std::exp(-0.5) * (1 + std::exp(-2.0) * std::cos(2 * x))));
    });
    CHECK(err < 1e-14);
    const auto y = solve_shifted_laplacian(u, 2.0);
    const auto back = laplacian(y) - 2.0 * y;
    CHECK(sup_distance(back, u) < 1e-13);
}
