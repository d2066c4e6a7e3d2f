/**
 * @file elliptic.hpp
 * @brief Pseudo-spectral solve of 0 = Lap v - lambda v + mu u on the periodic box.
 *
 * Every Fourier mode is inverted exactly: v_k = mu u_k / (lambda + |k|^2).
 */
#pragma once

#include "kslab/grid.hpp"
#include "kslab/params.hpp"

namespace kslab {

/// Throws PreconditionError on non-finite input or lambda <= 0.
ScalarField solve_helmholtz(const ScalarField& u, const Params& params);

/// Spectral gradient; Nyquist modes are dropped.
VectorField gradient(const ScalarField& v);

/// Spectral Laplacian (Nyquist modes kept, multiplier -|k|^2).
ScalarField laplacian(const ScalarField& u);

/// exp(tau (Lap - shift)) applied mode by mode.
ScalarField heat_semigroup(const ScalarField& u, double tau, double shift = 0.0);

/// Solves (Lap - shift) y = r spectrally; shift > 0.
ScalarField solve_shifted_laplacian(const ScalarField& r, double shift);

/// Sup norm of Lap v - lambda v + mu u in the discrete operator.
double helmholtz_residual(const ScalarField& u, const ScalarField& v, const Params& params);

}  // namespace kslab
