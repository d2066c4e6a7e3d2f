/**
 * @file params.hpp
 * @brief Model constants and discretization of the periodic box.
 */
#pragma once

#include "kslab/grid.hpp"

namespace kslab {

/// chi, lambda, mu plus the box [-L, L)^N and its resolution.
struct Params {
    double chi = 0.0;
    double lambda = 1.0;
    double mu = 1.0;
    int dim = 1;
    double box_half_length = 10.0;
    int grid_points = 256;

    /// Throws PreconditionError listing every violated invariant.
    void validate() const;

    Grid grid() const { return Grid{dim, grid_points, box_half_length}; }
    /// Copy with a different sensitivity.
    Params with_chi(double new_chi) const {
        Params p = *this;
        p.chi = new_chi;
        return p;
    }
    /// Copy with a different resolution.
    Params with_grid_points(int n) const {
        Params p = *this;
        p.grid_points = n;
        return p;
    }

    friend bool operator==(const Params&, const Params&) = default;
};

}  // namespace kslab
