#include "promo/time_utils.hpp"

#include <cctype>
#include <cstdio>
#include <ctime>

namespace promo {

namespace {

bool all_digits(const std::string& s, std::size_t begin, std::size_t end) {
    if (end > s.size() || begin >= end)
        return false;
    for (std::size_t i = begin; i < end; ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i])))
            return false;
    return true;
}

int to_int(const std::string& s, std::size_t begin, std::size_t len) {
    int value = 0;
    for (std::size_t i = begin; i < begin + len; ++i)
        value = value * 10 + (s[i] - '0');
    return value;
}

} // namespace

std::optional<UtcSeconds> parse_iso8601(const std::string& text) {
    // YYYY-MM-DD[T ]HH:MM:SS[.fff][Z|+HH:MM|+HHMM|+HH]
    if (text.size() < 19)
        return std::nullopt;
    if (!all_digits(text, 0, 4) || text[4] != '-' || !all_digits(text, 5, 7) ||
        text[7] != '-' || !all_digits(text, 8, 10))
        return std::nullopt;
    if (text[10] != 'T' && text[10] != ' ')
        return std::nullopt;
    if (!all_digits(text, 11, 13) || text[13] != ':' || !all_digits(text, 14, 16) ||
        text[16] != ':' || !all_digits(text, 17, 19))
        return std::nullopt;

    std::tm tm{};
    tm.tm_year = to_int(text, 0, 4) - 1900;
    tm.tm_mon = to_int(text, 5, 2) - 1;
    tm.tm_mday = to_int(text, 8, 2);
    tm.tm_hour = to_int(text, 11, 2);
    tm.tm_min = to_int(text, 14, 2);
    tm.tm_sec = to_int(text, 17, 2);
    if (tm.tm_mon < 0 || tm.tm_mon > 11 || tm.tm_mday < 1 || tm.tm_mday > 31 ||
        tm.tm_hour > 23 || tm.tm_min > 59 || tm.tm_sec > 59)
        return std::nullopt;

    std::size_t pos = 19;
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])))
            ++pos;
    }

    long offset_seconds = 0;
    if (pos < text.size()) {
        const char sign = text[pos];
        if (sign == 'Z') {
            ++pos;
        } else if (sign == '+' || sign == '-') {
            ++pos;
            if (!all_digits(text, pos, pos + 2))
                return std::nullopt;
            int hours = to_int(text, pos, 2);
            pos += 2;
            int minutes = 0;
            if (pos < text.size() && text[pos] == ':')
                ++pos;
            if (all_digits(text, pos, pos + 2)) {
                minutes = to_int(text, pos, 2);
                pos += 2;
            }
            offset_seconds = (hours * 3600L + minutes * 60L) * (sign == '-' ? -1 : 1);
        } else {
            return std::nullopt;
        }
    }
    if (pos != text.size())
        return std::nullopt;

    // timegm normalizes impossible dates (Feb 31 becomes Mar 3); reject those.
    std::tm probe = tm;
    const time_t utc = timegm(&probe);
    if (probe.tm_mon != tm.tm_mon || probe.tm_mday != tm.tm_mday)
        return std::nullopt;
    return static_cast<UtcSeconds>(utc) - offset_seconds;
}

std::string format_iso8601_utc(UtcSeconds t) {
    std::tm tm{};
    time_t tt = static_cast<time_t>(t);
    gmtime_r(&tt, &tm);
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%04d-%02d-%02dT%02d:%02d:%02dZ",
                  tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour,
                  tm.tm_min, tm.tm_sec);
    return buffer;
}

std::string format_date_utc(UtcSeconds t) {
    return format_iso8601_utc(t).substr(0, 10);
}

UtcSeconds now_utc() {
    return static_cast<UtcSeconds>(::time(nullptr));
}

} // namespace promo
