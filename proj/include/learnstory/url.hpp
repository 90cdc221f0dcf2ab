#pragma once

#include "learnstory/result.hpp"

#include <cstdint>
#include <string>
#include <string_view>

namespace learnstory {

struct ParsedUrl {
    std::string scheme;
    std::string authority;  // userinfo@host:port as written
    std::string path;
    std::string query;      // without '?'; empty when absent
    std::string fragment;   // without '#'; empty when absent
    bool has_query{false};
    bool has_fragment{false};

    [[nodiscard]] std::string host() const;
    [[nodiscard]] std::string to_string() const;
};

/// Absolute URLs only: scheme "://" non-empty host. Whitespace and control
/// characters are rejected.
Result<ParsedUrl> parse_url(std::string_view url);

/// Scheme and host lowercased, trailing slash on the path removed, query and
/// fragment kept verbatim. Used as the dedupe key for resources.
Result<std::string> normalize_url(std::string_view url);

/// Appends a "t=<seconds>s" time parameter: "&" when a query exists, "?"
/// otherwise. Offset 0 returns the URL unchanged. Any fragment stays last.
std::string append_time_parameter(std::string_view url, std::int64_t seconds);

} // namespace learnstory
