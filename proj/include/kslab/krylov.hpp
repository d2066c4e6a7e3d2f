/**
 * @file krylov.hpp
 * @brief Restarted GMRES with right preconditioning.
 */
#pragma once

#include <functional>
#include <vector>

namespace kslab {

using LinearMap = std::function<std::vector<double>(const std::vector<double>&)>;

struct GmresResult {
    std::vector<double> x;
    double residual = 0.0;  // final ||b - A x||_2
    int iterations = 0;
    bool converged = false;
};

/// Solves A x = b until ||b - A x||_2 <= tol * ||b||_2. `precond` applies M^{-1};
/// the iteration works on A M^{-1} y = b with x = M^{-1} y.
GmresResult gmres(const LinearMap& apply, const LinearMap& precond, const std::vector<double>& b, double tol,
                  int restart = 40, int max_iterations = 400);

}  // namespace kslab
