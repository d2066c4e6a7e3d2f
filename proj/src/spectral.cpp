#include "kslab/spectral.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "kslab/error.hpp"

namespace kslab {
namespace {

std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

const SpectralOps& SpectralOps::for_grid(const Grid& grid) {
    // The mutex must be constructed first so it outlives the cache.
    auto& mutex = plan_mutex();
    static std::map<std::pair<int, int>, std::unique_ptr<SpectralOps>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[{grid.dim, grid.points}];
    if (!slot) slot.reset(new SpectralOps(grid.dim, grid.points));
    return *slot;
}

SpectralOps::SpectralOps(int dim, int points) : dim_(dim), points_(points) {
    if (dim != 1 && dim != 2) throw PreconditionError("SpectralOps: dim must be 1 or 2");
    const int half = points / 2 + 1;
    real_size_ = dim == 1 ? static_cast<std::size_t>(points) : static_cast<std::size_t>(points) * points;
    spectrum_size_ = dim == 1 ? static_cast<std::size_t>(half) : static_cast<std::size_t>(points) * half;

    modes_[0].resize(spectrum_size_);
    modes_[1].assign(spectrum_size_, 0);
    if (dim == 1) {
        for (int j = 0; j < half; ++j) modes_[0][j] = j;
    } else {
        for (int iy = 0; iy < points; ++iy)
            for (int jx = 0; jx < half; ++jx) {
                const std::size_t k = static_cast<std::size_t>(iy) * half + jx;
                modes_[0][k] = jx;
                modes_[1][k] = iy <= points / 2 ? iy : iy - points;
            }
    }

    // Planning scratch; execution always goes through the new-array API.
    std::vector<double> r(real_size_);
    std::vector<Complex> c(spectrum_size_);
    auto* cp = reinterpret_cast<fftw_complex*>(c.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    if (dim == 1) {
        forward_plan_ = fftw_plan_dft_r2c_1d(points, r.data(), cp, flags);
        inverse_plan_ = fftw_plan_dft_c2r_1d(points, cp, r.data(), flags);
    } else {
        forward_plan_ = fftw_plan_dft_r2c_2d(points, points, r.data(), cp, flags);
        inverse_plan_ = fftw_plan_dft_c2r_2d(points, points, cp, r.data(), flags);
    }
}

SpectralOps::~SpectralOps() {
    std::lock_guard lock(plan_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
    fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
}

std::vector<Complex> SpectralOps::forward(std::span<const double> in) const {
    std::vector<Complex> out(spectrum_size_);
    // r2c leaves its input untouched.
    fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_plan_), const_cast<double*>(in.data()),
                         reinterpret_cast<fftw_complex*>(out.data()));
    return out;
}

void SpectralOps::inverse(std::span<const Complex> in, std::span<double> out) const {
    // c2r overwrites its input.
    std::vector<Complex> buffer(in.begin(), in.end());
    fftw_execute_dft_c2r(static_cast<fftw_plan>(inverse_plan_), reinterpret_cast<fftw_complex*>(buffer.data()),
                         out.data());
    const double scale = 1.0 / static_cast<double>(real_size_);
    for (double& v : out) v *= scale;
}

std::vector<double> SpectralOps::wavenumber_squared(double half_length) const {
    const double unit = std::numbers::pi / half_length;
    std::vector<double> k2(spectrum_size_);
    for (std::size_t k = 0; k < spectrum_size_; ++k) {
        const double kx = unit * modes_[0][k];
        const double ky = unit * modes_[1][k];
        k2[k] = kx * kx + ky * ky;
    }
    return k2;
}

std::vector<double> SpectralOps::difference_symbol(double half_length) const {
    const double h = 2.0 * half_length / points_;
    std::vector<double> sym(spectrum_size_);
    for (std::size_t k = 0; k < spectrum_size_; ++k) {
        const double sx = std::sin(std::numbers::pi * modes_[0][k] / points_);
        const double sy = std::sin(std::numbers::pi * modes_[1][k] / points_);
        sym[k] = 4.0 / (h * h) * (sx * sx + sy * sy);
    }
    return sym;
}

ScalarField apply_multiplier(const ScalarField& f, const std::vector<double>& multiplier) {
    const auto& ops = SpectralOps::for_grid(f.grid());
    auto spec = ops.forward(f.values());
    for (std::size_t k = 0; k < spec.size(); ++k) spec[k] *= multiplier[k];
    ScalarField out(f.grid());
    ops.inverse(spec, out.values());
    return out;
}

}  // namespace kslab
