#pragma once

#include "learnstory/result.hpp"

#include <chrono>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace learnstory {

/// All persisted and exported timestamps are UTC at second precision.
using Timestamp = std::chrono::sys_seconds;
using Seconds = std::chrono::seconds;

using Clock = std::function<Timestamp()>;

Clock system_clock();

/// "2024-03-01T09:30:00Z"
std::string format_iso8601(Timestamp t);
std::optional<Timestamp> parse_iso8601(std::string_view text);

/// Accepts a bare integer (seconds) or a number with one of the suffixes
/// s, m, h, d.
std::optional<Seconds> parse_duration(std::string_view text);

/// "1:15", "1:02:03"
std::string format_clock_offset(std::int64_t seconds);

} // namespace learnstory
