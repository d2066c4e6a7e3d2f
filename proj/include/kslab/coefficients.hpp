/**
 * @file coefficients.hpp
 * @brief Space-time logistic coefficients a(x,t), b(x,t) and their envelopes.
 *
 * Three closed profile kinds are supported:
 *  - constant:            w(x,t) = c
 *  - separable-periodic:  w(x,t) = c0 + sum_m A_m cos(k_m.x + phi_m) cos(omega_m t + psi_m)
 *  - tabulated:           nodal values on an n^N lattice of the box at increasing
 *                         times, multilinear in x (periodic) and linear in t.
 */
#pragma once

#include <array>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "kslab/grid.hpp"

namespace kslab {

using Point = std::array<double, 2>;

struct Envelope {
    double inf = 0.0;
    double sup = 0.0;
};

struct ConstantProfile {
    double value = 1.0;
};

/// amplitude * cos(wavenumber . x + phase) * cos(frequency * t + time_phase)
struct Harmonic {
    double amplitude = 0.0;
    std::array<double, 2> wavenumber{0.0, 0.0};
    double phase = 0.0;
    double frequency = 0.0;
    double time_phase = 0.0;
};

struct SeparableProfile {
    double offset = 1.0;
    std::vector<Harmonic> terms;
};

struct TabulatedProfile {
    int dim = 1;
    int nodes = 0;             // lattice points per axis
    double half_length = 1.0;  // lattice covers [-L, L)^dim
    std::vector<double> times;
    std::vector<std::vector<double>> values;  // one row-major slab per time
};

using Profile = std::variant<ConstantProfile, SeparableProfile, TabulatedProfile>;

enum class CoefficientKind { constant, separable_periodic, tabulated };

enum class Which { a, b };

const char* to_string(CoefficientKind kind);

/// Immutable after construction.
class CoefficientField {
public:
    /// Throws PreconditionError on malformed profiles (bad table shape,
    /// frequencies incompatible with `period`).
    CoefficientField(Profile a, Profile b, std::optional<double> period = std::nullopt);

    static CoefficientField constant(double a, double b);

    CoefficientKind kind() const;
    CoefficientKind kind(Which which) const;
    const Profile& profile(Which which) const { return which == Which::a ? a_ : b_; }
    std::optional<double> period() const { return period_; }
    /// True when neither coefficient depends on t.
    bool autonomous() const;
    /// True when neither coefficient depends on x.
    bool spatially_homogeneous() const;

    double evaluate(Which which, const Point& x, double t) const;
    /// Samples the coefficient on every grid node at time t.
    void fill(Which which, const Grid& grid, double t, ScalarField& out) const;
    ScalarField sample_grid(Which which, const Grid& grid, double t) const;

    const Envelope& envelope(Which which) const { return which == Which::a ? a_env_ : b_env_; }
    double a_inf() const { return a_env_.inf; }
    double a_sup() const { return a_env_.sup; }
    double b_inf() const { return b_env_.inf; }
    double b_sup() const { return b_env_.sup; }

    /// Throws HypothesisViolation naming the first envelope that is not
    /// positive and finite.
    void require_positive_bounded() const;

    /// Throws PreconditionError when a spatial harmonic or table does not
    /// fit the periodic box of `grid`.
    void require_box_compatible(const Grid& grid) const;

private:
    Profile a_;
    Profile b_;
    std::optional<double> period_;
    Envelope a_env_;
    Envelope b_env_;
};

/// Pointwise evaluation with the box check: x must lie in [-L, L)^N.
double sample_coefficient(const CoefficientField& coeffs, Which which, const Point& x, double t,
                          const Grid& grid);

}  // namespace kslab
