#include "kslab/elliptic.hpp"

#include <cmath>
#include <numbers>

#include "kslab/error.hpp"
#include "kslab/spectral.hpp"

namespace kslab {

ScalarField solve_helmholtz(const ScalarField& u, const Params& params) {
    if (!(params.lambda > 0.0)) throw PreconditionError("solve_helmholtz: lambda must be positive");
    if (!u.all_finite()) throw PreconditionError("solve_helmholtz: non-finite input");
    const auto& ops = SpectralOps::for_grid(u.grid());
    const auto k2 = ops.wavenumber_squared(u.grid().half_length);
    auto spec = ops.forward(u.values());
    for (std::size_t k = 0; k < spec.size(); ++k) spec[k] *= params.mu / (params.lambda + k2[k]);
    ScalarField v(u.grid());
    ops.inverse(spec, v.values());
    return v;
}

VectorField gradient(const ScalarField& v) {
    const Grid& grid = v.grid();
    const auto& ops = SpectralOps::for_grid(grid);
    const double unit = std::numbers::pi / grid.half_length;
    const auto spec = ops.forward(v.values());
    VectorField g;
    for (int axis = 0; axis < grid.dim; ++axis) {
        std::vector<Complex> d(spec.size());
        const auto& m = ops.mode(axis);
        for (std::size_t k = 0; k < spec.size(); ++k)
            d[k] = ops.nyquist(k, axis) ? Complex{} : Complex(0.0, unit * m[k]) * spec[k];
        ScalarField comp(grid);
        ops.inverse(d, comp.values());
        g.components.push_back(std::move(comp));
    }
    return g;
}

ScalarField laplacian(const ScalarField& u) {
    const auto& ops = SpectralOps::for_grid(u.grid());
    auto k2 = ops.wavenumber_squared(u.grid().half_length);
    for (double& x : k2) x = -x;
    return apply_multiplier(u, k2);
}

ScalarField heat_semigroup(const ScalarField& u, double tau, double shift) {
    const auto& ops = SpectralOps::for_grid(u.grid());
    auto k2 = ops.wavenumber_squared(u.grid().half_length);
    for (double& x : k2) x = std::exp(-tau * (x + shift));
    return apply_multiplier(u, k2);
}

ScalarField solve_shifted_laplacian(const ScalarField& r, double shift) {
    const auto& ops = SpectralOps::for_grid(r.grid());
    auto k2 = ops.wavenumber_squared(r.grid().half_length);
    for (double& x : k2) x = -1.0 / (x + shift);
    return apply_multiplier(r, k2);
}

double helmholtz_residual(const ScalarField& u, const ScalarField& v, const Params& params) {
    ScalarField r = laplacian(v);
    double m = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i)
        m = std::max(m, std::abs(r[i] - params.lambda * v[i] + params.mu * u[i]));
    return m;
}

}  // namespace kslab
