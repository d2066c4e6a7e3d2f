#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "kslab/error.hpp"
#include "kslab/model.hpp"
#include "support.hpp"

using namespace kslab;
using kslab::test::close_rel;

TEST_CASE("hypothesis slacks without chemotaxis") {
    const auto c = CoefficientField::constant(1.0, 1.0);
    const auto r = validate_coefficients(c, test::params_1d(0.0, 10, 64));
    CHECK(r.holds_h1);
    CHECK(r.holds_h2);
    CHECK(r.holds_h3);
    CHECK(r.slack_h1 == 1.0);
    CHECK(r.slack_h2 == 1.0);
    CHECK(r.slack_h3 == 1.0);
}

TEST_CASE("hypothesis slacks with chi = 0.2") {
    const auto c = CoefficientField::constant(1.0, 1.0);
    const auto r = validate_coefficients(c, test::params_1d(0.2, 10, 64));
    CHECK(close_rel(r.slack_h1, 0.8, 1e-14));
    CHECK(close_rel(r.slack_h2, 0.6, 1e-14));
    CHECK(close_rel(r.slack_h3, 0.588196601125010515, 1e-14));
}

TEST_CASE("H2 fails for a in [1,2], chi = 0.4") {
    const auto c = test::heterogeneous_a(1.0);
    CHECK(c.a_inf() == 1.0);
    CHECK(c.a_sup() == 2.0);
    const auto r = validate_coefficients(c, test::params_1d(0.4, std::numbers::pi, 64));
    CHECK(r.holds_h1);
    CHECK_FALSE(r.holds_h2);
    CHECK(close_rel(r.slack_h2, 1.0 - 1.2, 1e-14));
    CHECK_THROWS_AS(attraction_rectangle(c, test::params_1d(0.4, std::numbers::pi, 64)), HypothesisViolation);
}

TEST_CASE("attraction rectangle closed forms") {
    const auto p0 = test::params_1d(0.0, std::numbers::pi, 64);
    auto r0 = attraction_rectangle(test::heterogeneous_a(1.0), p0);
    CHECK(r0.lower == doctest::Approx(1.0).epsilon(1e-14));  // a_inf / b_sup
    CHECK(r0.upper == doctest::Approx(2.0).epsilon(1e-14));  // a_sup / b_inf

    auto rc = attraction_rectangle(CoefficientField::constant(1, 1), test::params_1d(0.2, 10, 64));
    CHECK(close_rel(rc.lower, 1.0, 1e-14));
    CHECK(close_rel(rc.upper, 1.0, 1e-14));

    auto rh = attraction_rectangle(test::heterogeneous_a(1.0), test::params_1d(0.1, std::numbers::pi, 64));
    CHECK(close_rel(rh.lower, 0.875, 1e-14));
    CHECK(close_rel(rh.upper, 2.125, 1e-14));
}

TEST_CASE("sup bound") {
    CHECK(sup_bound(CoefficientField::constant(1, 1), test::params_1d(0.0, 10, 64)) == 1.0);
    CHECK(close_rel(sup_bound(CoefficientField::constant(1, 1), test::params_1d(0.2, 10, 64)), 1.25, 1e-14));
    CHECK(close_rel(sup_bound(test::heterogeneous_a(1.0), test::params_1d(0.1, std::numbers::pi, 64)),
                    2.2222222222222222, 1e-14));
    CHECK_THROWS_AS(sup_bound(CoefficientField::constant(1, 1), test::params_1d(1.0, 10, 64)), HypothesisViolation);
}

TEST_CASE("sample_coefficient") {
    const Grid g{1, 64, 1.0};
    const auto c = CoefficientField::constant(1.0, 2.0);
    CHECK(sample_coefficient(c, Which::a, {0.3, 0}, 17.0, g) == 1.0);
    CHECK_THROWS_AS(sample_coefficient(c, Which::a, {1.0, 0}, 0.0, g), PreconditionError);

    SeparableProfile a{1.0, {Harmonic{0.5, {0, 0}, 0.0, 2 * std::numbers::pi, -std::numbers::pi / 2}}};
    const CoefficientField periodic(a, ConstantProfile{1.0}, 1.0);
    CHECK(sample_coefficient(periodic, Which::a, {0.0, 0}, 0.25, g) == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(periodic.evaluate(Which::a, {0, 0}, 3.25) == doctest::Approx(1.5).epsilon(1e-13));
    CHECK(periodic.a_inf() == 0.5);
    CHECK(periodic.a_sup() == 1.5);

    TabulatedProfile tab;
    tab.dim = 1;
    tab.nodes = 4;
    tab.half_length = 1.0;
    tab.times = {0.0, 1.0};
    tab.values = {{1.0, 2.0, 3.0, 4.0}, {2.0, 2.0, 2.0, 2.0}};
    const CoefficientField tabulated(tab, ConstantProfile{1.0});
    CHECK(tabulated.evaluate(Which::a, {-0.5, 0}, 0.0) == 2.0);  // node 1 at t = 0
    CHECK(tabulated.evaluate(Which::a, {0.5, 0}, 1.0) == 2.0);
    CHECK(tabulated.evaluate(Which::a, {-0.5, 0}, 0.5) == doctest::Approx(2.0));
    CHECK(tabulated.a_inf() == 1.0);
    CHECK(tabulated.a_sup() == 4.0);
    CHECK_THROWS_AS(tabulated.evaluate(Which::a, {0, 0}, 1.5), PreconditionError);
    CHECK_THROWS_AS(tabulated.evaluate(Which::a, {0, 0}, -0.1), PreconditionError);
}

TEST_CASE("envelopes bound sampled values") {
    SeparableProfile a{1.0, {Harmonic{0.3, {0, 0}, 0, 1.0, 0}, Harmonic{0.3, {0, 0}, 0, std::sqrt(2.0), 0}}};
    const CoefficientField quasi(a, ConstantProfile{1.0});
    CHECK(quasi.a_inf() >= 0.4 - 1e-12);
    CHECK(quasi.a_sup() <= 1.6 + 1e-12);
    std::mt19937_64 rng(3);
    for (int i = 0; i < 1000; ++i) {
        const double t = test::uniform(rng, -500, 500);
        const double w = quasi.evaluate(Which::a, {0, 0}, t);
        CHECK(w >= quasi.a_inf());
        CHECK(w <= quasi.a_sup());
    }

    // Commensurate harmonics that never align: the sampled envelope is widened, not snapped.
    SeparableProfile c{2.0, {Harmonic{1.0, {1, 0}, 0, 0, 0}, Harmonic{1.0, {2, 0}, 0, 0, 0}}};
    const CoefficientField comm(c, ConstantProfile{1.0});
    CHECK(comm.a_inf() > 0.0);  // true inf is 2 - 9/8 = 0.875, never 0
    CHECK(comm.a_inf() <= 0.875);
    CHECK(comm.a_inf() == doctest::Approx(0.875).epsilon(1e-2));
    CHECK(comm.a_sup() >= 4.0);
}

TEST_CASE("invalid coefficients are rejected with the envelope named") {
    const auto bad = CoefficientField::constant(1.0, -0.5);
    try {
        validate_coefficients(bad, test::params_1d(0.1, 10, 64));
        FAIL("expected HypothesisViolation");
    } catch (const HypothesisViolation& e) {
        CHECK(std::string(e.what()).find("b_inf") != std::string::npos);
    }
    SeparableProfile a{0.2, {Harmonic{0.5, {1, 0}, 0, 0, 0}}};
    const CoefficientField neg(a, ConstantProfile{1.0});
    CHECK_THROWS_WITH_AS(validate_coefficients(neg, test::params_1d(0.0, std::numbers::pi, 64)),
                         doctest::Contains("a_inf"), HypothesisViolation);
}

TEST_CASE("box compatibility and period checks") {
    const auto c = test::heterogeneous_a(1.0);
    CHECK_NOTHROW(c.require_box_compatible(Grid{1, 64, std::numbers::pi}));
    CHECK_THROWS_AS(c.require_box_compatible(Grid{1, 64, 1.0}), PreconditionError);
    SeparableProfile a{1.0, {Harmonic{0.5, {0, 0}, 0, 3.0, 0}}};
    CHECK_THROWS_AS(CoefficientField(a, ConstantProfile{1.0}, 1.0), PreconditionError);
}

TEST_CASE("Params validation lists problems") {
    Params p;
    p.lambda = 0;
    p.grid_points = 15;
    CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("lambda"), PreconditionError);
    CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("grid points"), PreconditionError);
}

// Random sweeps over envelopes and constants.
TEST_CASE("property: H2 => H1, H3 => H1, rectangle ordering and monotonicity") {
    std::mt19937_64 rng(20261018);
    int h2_cases = 0;
    for (int trial = 0; trial < 2000; ++trial) {
        const double a_inf = test::uniform(rng, 0.1, 3.0);
        const double a_sup = a_inf + test::uniform(rng, 0.0, 3.0);
        const double b_inf = test::uniform(rng, 0.1, 3.0);
        const double b_sup = b_inf + test::uniform(rng, 0.0, 2.0);
        const double mid_a = 0.5 * (a_inf + a_sup), mid_b = 0.5 * (b_inf + b_sup);
        SeparableProfile a{mid_a, {Harmonic{a_sup - mid_a, {1, 0}, 0, 0, 0}}};
        SeparableProfile b{mid_b, {Harmonic{b_sup - mid_b, {1, 0}, 0, 0, 0}}};
        const CoefficientField c(a, b);
        auto p = test::params_1d(test::uniform(rng, 0.0, 2.0), std::numbers::pi, 64, test::uniform(rng, 0.1, 3),
                                 test::uniform(rng, 0.1, 3));
        p.dim = trial % 2 == 0 ? 1 : 2;
        const auto h = validate_coefficients(c, p);
        CHECK(h.holds_h1 == (h.slack_h1 > 0));
        if (h.holds_h2) CHECK(h.holds_h1);
        if (h.holds_h3) CHECK(h.holds_h1);
        if (!h.holds_h2) continue;
        ++h2_cases;
        const auto r = attraction_rectangle(c, p);
        CHECK(r.lower > 0.0);
        CHECK(r.lower <= r.upper);
        const double cap = sup_bound(c, p);
        if (p.chi > 0) CHECK(r.upper < cap);
        else CHECK(r.upper <= cap);
        // Increasing chi while keeping (H2) widens the rectangle.
        const auto p2 = p.with_chi(p.chi * 1.01 + 1e-6);
        if (validate_coefficients(c, p2).holds_h2) {
            const auto r2 = attraction_rectangle(c, p2);
            CHECK(r2.lower <= r.lower);
            CHECK(r2.upper >= r.upper);
        }
    }
    CHECK(h2_cases > 200);
}
