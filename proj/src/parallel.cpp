#include "kslab/parallel.hpp"

#include <cstdlib>
#include <string>

namespace kslab {

int workers_from_env(int fallback) {
    const char* env = std::getenv("KSLAB_WORKERS");
    if (!env || !*env) return fallback;
    try {
        std::size_t used = 0;
        const int n = std::stoi(env, &used);
        if (used == std::string(env).size() && n >= 1) return n;
    } catch (const std::exception&) {
    }
    return fallback;
}

}  // namespace kslab
