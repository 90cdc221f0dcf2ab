#include "learnstory/time.hpp"

#include <charconv>
#include <cstdio>
#include <ctime>

namespace learnstory {

Clock system_clock() {
    return [] { return std::chrono::floor<Seconds>(std::chrono::system_clock::now()); };
}

std::string format_iso8601(Timestamp t) {
    const std::time_t secs = t.time_since_epoch().count();
    std::tm tm{};
    gmtime_r(&secs, &tm);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900, tm.tm_mon + 1,
                  tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
    return buf;
}

std::optional<Timestamp> parse_iso8601(std::string_view text) {
    // Exactly YYYY-MM-DDTHH:MM:SSZ.
    if (text.size() != 20 || text[4] != '-' || text[7] != '-' || text[10] != 'T' || text[13] != ':' ||
        text[16] != ':' || text[19] != 'Z') {
        return std::nullopt;
    }
    auto field = [&](std::size_t pos, std::size_t len, int& out) {
        const char* first = text.data() + pos;
        auto [ptr, ec] = std::from_chars(first, first + len, out);
        return ec == std::errc{} && ptr == first + len;
    };
    int year = 0, month = 0, day = 0, hour = 0, minute = 0, second = 0;
    if (!field(0, 4, year) || !field(5, 2, month) || !field(8, 2, day) || !field(11, 2, hour) ||
        !field(14, 2, minute) || !field(17, 2, second)) {
        return std::nullopt;
    }
    if (month < 1 || month > 12 || day < 1 || day > 31 || hour > 23 || minute > 59 || second > 60) {
        return std::nullopt;
    }
    std::tm tm{};
    tm.tm_year = year - 1900;
    tm.tm_mon = month - 1;
    tm.tm_mday = day;
    tm.tm_hour = hour;
    tm.tm_min = minute;
    tm.tm_sec = second;
    const std::time_t secs = timegm(&tm);
    const Timestamp t{Seconds{secs}};
    if (format_iso8601(t) != text) {
        return std::nullopt;  // out-of-range day such as Feb 30
    }
    return t;
}

std::optional<Seconds> parse_duration(std::string_view text) {
    if (text.empty()) {
        return std::nullopt;
    }
    long long multiplier = 1;
    switch (text.back()) {
        case 's': multiplier = 1; text.remove_suffix(1); break;
        case 'm': multiplier = 60; text.remove_suffix(1); break;
        case 'h': multiplier = 3600; text.remove_suffix(1); break;
        case 'd': multiplier = 86400; text.remove_suffix(1); break;
        default: break;
    }
    long long value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
        return std::nullopt;
    }
    return Seconds{value * multiplier};
}

std::string format_clock_offset(std::int64_t seconds) {
    const auto h = seconds / 3600;
    const auto m = (seconds % 3600) / 60;
    const auto s = seconds % 60;
    char buf[48];
    if (h > 0) {
        std::snprintf(buf, sizeof buf, "%lld:%02lld:%02lld", static_cast<long long>(h),
                      static_cast<long long>(m), static_cast<long long>(s));
    } else {
        std::snprintf(buf, sizeof buf, "%lld:%02lld", static_cast<long long>(m), static_cast<long long>(s));
    }
    return buf;
}

} // namespace learnstory
