/**
 * @file log.hpp
 * @brief Minimal stderr logging. KSLAB_LOG=quiet|warn|info selects the level.
 */
#pragma once

#include <string>

namespace kslab::log {

enum class Level { quiet = 0, warn = 1, info = 2 };

Level level();
void set_level(Level level);
void warn(const std::string& message);
void info(const std::string& message);
/// Number of warnings emitted since start (including suppressed ones).
long warning_count();

}  // namespace kslab::log
