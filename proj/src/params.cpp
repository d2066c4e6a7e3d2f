#include "kslab/params.hpp"

#include <cmath>
#include <string>

#include "kslab/error.hpp"

namespace kslab {

void Params::validate() const {
    std::string problems;
    auto flag = [&](bool bad, const char* msg) {
        if (bad) problems += std::string(problems.empty() ? "" : "; ") + msg;
    };
    flag(!(std::isfinite(chi) && chi >= 0.0), "chi must be finite and >= 0");
    flag(!(std::isfinite(lambda) && lambda > 0.0), "lambda must be > 0");
    flag(!(std::isfinite(mu) && mu > 0.0), "mu must be > 0");
    flag(dim != 1 && dim != 2, "dim must be 1 or 2");
    flag(!(std::isfinite(box_half_length) && box_half_length > 0.0), "box half-length must be > 0");
    flag(grid_points < 16 || grid_points % 2 != 0, "grid points must be even and >= 16");
    if (!problems.empty()) throw PreconditionError("invalid Params: " + problems);
}

}  // namespace kslab
