/**
 * @file log.hpp
 * @brief Leveled stderr logging
 *
 * Timestamps appear only here, never in data outputs. ANSI colour is used on
 * a terminal unless MRIQC_DHOGM_NO_COLOR is set.
 */
#pragma once

#include <string_view>

namespace dhogm::log {

enum class Level { Debug, Info, Warn, Error };

void set_level(Level level);
Level level();

void write(Level level, std::string_view message);

inline void debug(std::string_view m) { write(Level::Debug, m); }
inline void info(std::string_view m) { write(Level::Info, m); }
inline void warn(std::string_view m) { write(Level::Warn, m); }
inline void error(std::string_view m) { write(Level::Error, m); }

} // namespace dhogm::log
