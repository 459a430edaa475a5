#pragma once

#include <functional>
#include <string>
#include <string_view>

namespace promo::log {

enum class Level { debug, info, warn, error };

const char* level_name(Level level);

using Sink = std::function<void(Level, std::string_view)>;

void set_level(Level level);
Level threshold();

// Replaces the output sink; an empty sink restores the stderr default.
// Returns the previously installed sink so callers can restore it.
Sink set_sink(Sink sink);

void write(Level level, std::string_view message);

inline void debug(std::string_view message) { write(Level::debug, message); }
inline void info(std::string_view message) { write(Level::info, message); }
inline void warn(std::string_view message) { write(Level::warn, message); }
inline void error(std::string_view message) { write(Level::error, message); }

} // namespace promo::log
