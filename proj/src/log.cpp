#include "promo/log.hpp"

#include <cstdio>
#include <mutex>

namespace promo::log {

namespace {

std::mutex mutex;
Level current_level = Level::info;
Sink current_sink;

void stderr_sink(Level level, std::string_view message) {
    std::fprintf(stderr, "[%s] %.*s\n", level_name(level),
                 static_cast<int>(message.size()), message.data());
}

} // namespace

const char* level_name(Level level) {
    switch (level) {
    case Level::debug: return "debug";
    case Level::info: return "info";
    case Level::warn: return "warn";
    case Level::error: return "error";
    }
    return "?";
}

void set_level(Level level) {
    std::lock_guard lock(mutex);
    current_level = level;
}

Level threshold() {
    std::lock_guard lock(mutex);
    return current_level;
}

Sink set_sink(Sink sink) {
    std::lock_guard lock(mutex);
    Sink previous = std::move(current_sink);
    current_sink = std::move(sink);
    return previous;
}

void write(Level level, std::string_view message) {
    Sink sink;
    {
        std::lock_guard lock(mutex);
        if (static_cast<int>(level) < static_cast<int>(current_level))
            return;
        sink = current_sink;
    }
    if (sink)
        sink(level, message);
    else
        stderr_sink(level, message);
}

} // namespace promo::log
