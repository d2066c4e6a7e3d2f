/**
 * @file spectral.hpp
 * @brief Real-to-complex FFTs on periodic grids with cached FFTW plans.
 *
 * Plans are created once per (dim, points) under a mutex and executed through
 * the new-array interface, so a SpectralOps instance may be shared by threads.
 */
#pragma once

#include <complex>
#include <span>
#include <vector>

#include "kslab/grid.hpp"

namespace kslab {

using Complex = std::complex<double>;

class SpectralOps {
public:
    /// Shared instance for `grid` (plans depend on dim and points only).
    static const SpectralOps& for_grid(const Grid& grid);

    ~SpectralOps();
    SpectralOps(const SpectralOps&) = delete;
    SpectralOps& operator=(const SpectralOps&) = delete;

    std::size_t real_size() const { return real_size_; }
    std::size_t spectrum_size() const { return spectrum_size_; }

    /// Unnormalised forward transform.
    std::vector<Complex> forward(std::span<const double> in) const;
    /// Inverse transform including the 1/size normalisation.
    void inverse(std::span<const Complex> in, std::span<double> out) const;

    /// Integer mode index m along `axis` for each spectral entry (axis 0 = x,
    /// the fastest-varying one); physical wavenumber is m * pi / L.
    const std::vector<int>& mode(int axis) const { return modes_[axis]; }
    /// True where the entry holds a Nyquist mode along `axis`.
    bool nyquist(std::size_t k, int axis) const { return 2 * std::abs(modes_[axis][k]) == points_; }

    /// |k|^2 for each entry on a box of half-length L.
    std::vector<double> wavenumber_squared(double half_length) const;
    /// Symbol of minus the second-order central difference Laplacian,
    /// sum over axes of (4/h^2) sin^2(k h / 2).
    std::vector<double> difference_symbol(double half_length) const;

private:
    SpectralOps(int dim, int points);

    int dim_;
    int points_;
    std::size_t real_size_;
    std::size_t spectrum_size_;
    std::vector<int> modes_[2];
    void* forward_plan_ = nullptr;
    void* inverse_plan_ = nullptr;
};

/// Applies a real diagonal multiplier in Fourier space.
ScalarField apply_multiplier(const ScalarField& f, const std::vector<double>& multiplier);

}  // namespace kslab
