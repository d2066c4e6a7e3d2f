#include "kslab/grid.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

#include "kslab/error.hpp"

namespace kslab {

std::size_t Grid::size() const {
    std::size_t n = 1;
    for (int d = 0; d < dim; ++d) n *= static_cast<std::size_t>(points);
    return n;
}

ScalarField::ScalarField(const Grid& grid, double fill) : grid_(grid), values_(grid.size(), fill) {}

ScalarField::ScalarField(const Grid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) throw PreconditionError("ScalarField: value count does not match grid");
}

double ScalarField::min() const {
    return values_.empty() ? 0.0 : *std::min_element(values_.begin(), values_.end());
}

double ScalarField::max() const {
    return values_.empty() ? 0.0 : *std::max_element(values_.begin(), values_.end());
}

double ScalarField::max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

bool ScalarField::all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

ScalarField& ScalarField::operator+=(const ScalarField& other) {
    assert(other.grid_ == grid_);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
    return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& other) {
    assert(other.grid_ == grid_);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
    return *this;
}

ScalarField& ScalarField::operator*=(double s) {
    for (double& v : values_) v *= s;
    return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

double sup_distance(const ScalarField& a, const ScalarField& b) {
    if (!(a.grid() == b.grid())) throw PreconditionError("sup_distance: grids differ");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

double VectorField::max_norm() const {
    if (components.empty()) return 0.0;
    const std::size_t n = components.front().size();
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (const auto& c : components) s += c[i] * c[i];
        m = std::max(m, s);
    }
    return std::sqrt(m);
}

}  // namespace kslab
