/**
 * @file grid.hpp
 * @brief Uniform periodic grids on [-L, L)^N and the fields living on them.
 */
#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace kslab {

/// Uniform periodic grid with `points` nodes per axis on [-L, L)^dim.
struct Grid {
    int dim = 1;
    int points = 64;
    double half_length = 1.0;

    double spacing() const { return 2.0 * half_length / points; }
    std::size_t size() const;
    /// Coordinate of node i along any axis.
    double coordinate(int i) const { return -half_length + i * spacing(); }

    friend bool operator==(const Grid&, const Grid&) = default;
};

/// Real values on a Grid, row-major (last axis fastest).
class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(const Grid& grid, double fill = 0.0);
    ScalarField(const Grid& grid, std::vector<double> values);

    const Grid& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }

    double& operator[](std::size_t i) { return values_[i]; }
    double operator[](std::size_t i) const { return values_[i]; }

    /// 2D access; row index iy, column index ix.
    double& at(int iy, int ix) { return values_[static_cast<std::size_t>(iy) * grid_.points + ix]; }
    double at(int iy, int ix) const { return values_[static_cast<std::size_t>(iy) * grid_.points + ix]; }

    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }
    std::vector<double>& data() { return values_; }
    const std::vector<double>& data() const { return values_; }

    double min() const;
    double max() const;
    double max_abs() const;
    bool all_finite() const;

    ScalarField& operator+=(const ScalarField& other);
    ScalarField& operator-=(const ScalarField& other);
    ScalarField& operator*=(double s);

private:
    Grid grid_{};
    std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);

/// Sup norm of a - b. Grids must match.
double sup_distance(const ScalarField& a, const ScalarField& b);

/// One ScalarField per axis.
struct VectorField {
    std::vector<ScalarField> components;

    /// Pointwise Euclidean norm, maximised over the grid.
    double max_norm() const;
};

/// Calls fn(index, x, y) for each node; y is 0 in 1D.
template <typename Fn>
void for_each_node(const Grid& grid, Fn&& fn) {
    if (grid.dim == 1) {
        for (int i = 0; i < grid.points; ++i) fn(static_cast<std::size_t>(i), grid.coordinate(i), 0.0);
        return;
    }
    std::size_t k = 0;
    for (int iy = 0; iy < grid.points; ++iy) {
        const double y = grid.coordinate(iy);
        for (int ix = 0; ix < grid.points; ++ix) fn(k++, grid.coordinate(ix), y);
    }
}

}  // namespace kslab
