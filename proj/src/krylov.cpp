#include "kslab/krylov.hpp"

#include <cmath>

namespace kslab {
namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

void axpy(double alpha, const std::vector<double>& x, std::vector<double>& y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

}  // namespace

GmresResult gmres(const LinearMap& apply, const LinearMap& precond, const std::vector<double>& b, double tol,
                  int restart, int max_iterations) {
    const std::size_t n = b.size();
    GmresResult out;
    out.x.assign(n, 0.0);
    const double bnorm = norm(b);
    if (bnorm == 0.0) {
        out.converged = true;
        return out;
    }
    const double target = tol * bnorm;
    std::vector<double> r = b;
    double beta = bnorm;

    while (out.iterations < max_iterations) {
        std::vector<std::vector<double>> basis{r};
        for (double& e : basis[0]) e /= beta;
        std::vector<std::vector<double>> hess;  // column j has j + 2 entries
        std::vector<double> cs, sn, g{beta};
        int j = 0;
        for (; j < restart && out.iterations < max_iterations; ++j, ++out.iterations) {
            std::vector<double> w = apply(precond(basis[j]));
            std::vector<double> h(j + 2, 0.0);
            // Modified Gram-Schmidt, applied twice for stability.
            for (int pass = 0; pass < 2; ++pass)
                for (int i = 0; i <= j; ++i) {
                    const double c = dot(w, basis[i]);
                    h[i] += c;
                    axpy(-c, basis[i], w);
                }
            h[j + 1] = norm(w);
            for (int i = 0; i < j; ++i) {
                const double t = cs[i] * h[i] + sn[i] * h[i + 1];
                h[i + 1] = -sn[i] * h[i] + cs[i] * h[i + 1];
                h[i] = t;
            }
            const double denom = std::hypot(h[j], h[j + 1]);
            cs.push_back(denom == 0.0 ? 1.0 : h[j] / denom);
            sn.push_back(denom == 0.0 ? 0.0 : h[j + 1] / denom);
            const double hj1 = h[j + 1];
            h[j] = cs[j] * h[j] + sn[j] * hj1;
            h[j + 1] = 0.0;
            g.push_back(-sn[j] * g[j]);
            g[j] *= cs[j];
            hess.push_back(std::move(h));
            if (std::abs(g[j + 1]) <= target || hj1 == 0.0) {
                ++j;
                ++out.iterations;
                break;
            }
            for (double& e : w) e /= hj1;
            basis.push_back(std::move(w));
        }
        // Back substitution for the least-squares coefficients.
        std::vector<double> y(j, 0.0);
        for (int i = j - 1; i >= 0; --i) {
            double s = g[i];
            for (int k = i + 1; k < j; ++k) s -= hess[k][i] * y[k];
            y[i] = s / hess[i][i];
        }
        std::vector<double> update(n, 0.0);
        for (int i = 0; i < j; ++i) axpy(y[i], basis[i], update);
        axpy(1.0, precond(update), out.x);

        r = b;
        axpy(-1.0, apply(out.x), r);
        beta = norm(r);
        out.residual = beta;
        if (beta <= target) {
            out.converged = true;
            break;
        }
    }
    return out;
}

}  // namespace kslab
