// Shared helpers for the unit and acceptance suites.
#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <numbers>
#include <random>

#include <unistd.h>

#include "kslab/coefficients.hpp"
#include "kslab/grid.hpp"
#include "kslab/params.hpp"

namespace kslab::test {

inline bool close_rel(double got, double want, double rel) {
    return std::abs(got - want) <= rel * std::max(1.0, std::abs(want));
}

/// Uniform double in [lo, hi) built from raw 53-bit draws.
inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Smooth positive random field: a few random Fourier modes rescaled into [lo, hi].
inline ScalarField random_smooth_field(const Grid& grid, std::mt19937_64& rng, double lo, double hi, int modes = 6) {
    ScalarField f(grid);
    const double unit = std::numbers::pi / grid.half_length;
    for (int m = 0; m < modes; ++m) {
        const double kx = unit * static_cast<int>(uniform(rng, 1, 6));
        const double ky = grid.dim == 2 ? unit * static_cast<int>(uniform(rng, 0, 6)) : 0.0;
        const double amp = uniform(rng, -1, 1);
        const double ph = uniform(rng, 0, 2 * std::numbers::pi);
        for_each_node(grid, [&](std::size_t k, double x, double y) { f[k] += amp * std::cos(kx * x + ky * y + ph); });
    }
    const double mn = f.min(), mx = f.max();
    for (double& v : f.data()) v = lo + (hi - lo) * (mx > mn ? (v - mn) / (mx - mn) : 0.5);
    return f;
}

/// Independent nodal values in [lo, hi].
inline ScalarField random_rough_field(const Grid& grid, std::mt19937_64& rng, double lo, double hi) {
    ScalarField f(grid);
    for (double& v : f.data()) v = uniform(rng, lo, hi);
    return f;
}

inline Params params_1d(double chi, double L, int n, double lambda = 1.0, double mu = 1.0) {
    Params p;
    p.chi = chi;
    p.lambda = lambda;
    p.mu = mu;
    p.dim = 1;
    p.box_half_length = L;
    p.grid_points = n;
    return p;
}

/// a(x) = 1.5 + 0.5 cos(k x), b = 1: the heterogeneous a in [1, 2] problem.
inline CoefficientField heterogeneous_a(double k) {
    SeparableProfile a{1.5, {Harmonic{0.5, {k, 0.0}, 0.0, 0.0, 0.0}}};
    return CoefficientField(a, ConstantProfile{1.0});
}

/// Fresh directory under the system temp dir, removed on destruction.
class ScratchDir {
public:
    explicit ScratchDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("kslab_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~ScratchDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    ScratchDir(const ScratchDir&) = delete;
    ScratchDir& operator=(const ScratchDir&) = delete;

    std::string operator/(const std::string& rel) const { return (path_ / rel).string(); }
    std::string str() const { return path_.string(); }

private:
    std::filesystem::path path_;
};

}  // namespace kslab::test
