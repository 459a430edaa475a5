#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace promo {

// Seconds since the Unix epoch, always UTC.
using UtcSeconds = std::int64_t;

// Parses ISO 8601 timestamps ("2026-08-13T12:00:00Z", "...+02:00", "...-0500",
// optional fractional seconds). The offset is folded into the returned UTC value.
std::optional<UtcSeconds> parse_iso8601(const std::string& text);

std::string format_iso8601_utc(UtcSeconds t); // 2026-08-13T12:00:00Z
std::string format_date_utc(UtcSeconds t);    // 2026-08-13

UtcSeconds now_utc();

} // namespace promo
