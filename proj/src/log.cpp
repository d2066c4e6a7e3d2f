#include "kslab/log.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <iostream>
#include <mutex>

namespace kslab::log {
namespace {

Level initial_level() {
    const char* env = std::getenv("KSLAB_LOG");
    if (!env) return Level::warn;
    if (std::strcmp(env, "quiet") == 0) return Level::quiet;
    if (std::strcmp(env, "info") == 0) return Level::info;
    return Level::warn;
}

std::atomic<int> g_level{static_cast<int>(initial_level())};
std::atomic<long> g_warnings{0};
std::mutex g_out;

// Repeated warnings are capped so long runs do not flood stderr.
constexpr long kMaxPrintedWarnings = 20;

}  // namespace

Level level() { return static_cast<Level>(g_level.load()); }
void set_level(Level l) { g_level.store(static_cast<int>(l)); }

void warn(const std::string& message) {
    const long n = ++g_warnings;
    if (level() < Level::warn || n > kMaxPrintedWarnings) return;
    std::lock_guard lock(g_out);
    std::cerr << "[kslab warn] " << message << (n == kMaxPrintedWarnings ? " (further warnings suppressed)" : "")
              << '\n';
}

void info(const std::string& message) {
    if (level() < Level::info) return;
    std::lock_guard lock(g_out);
    std::cerr << "[kslab] " << message << '\n';
}

long warning_count() { return g_warnings.load(); }

}  // namespace kslab::log
