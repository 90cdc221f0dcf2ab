#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace learnstory::text {

std::string_view trim(std::string_view s) noexcept;
bool is_space(char c) noexcept;
std::string to_lower_ascii(std::string_view s);

/// Every whitespace run becomes a single space; result is trimmed.
std::string collapse_whitespace(std::string_view s);

/// Tag names: lowercased, trimmed, internal whitespace runs collapsed to a
/// single hyphen. "  Vue   Basics " -> "vue-basics".
std::string normalize_tag_name(std::string_view name);

/// Lowercase; runs of non-alphanumerics become one hyphen; leading and
/// trailing hyphens trimmed. May return an empty string.
std::string slugify(std::string_view s);

/// Number of UTF-8 code points. Invalid lead bytes count as one each.
std::size_t utf8_length(std::string_view s) noexcept;

/// Byte offset of the code point boundary at or before `count` code points.
std::size_t utf8_prefix_bytes(std::string_view s, std::size_t count) noexcept;

} // namespace learnstory::text
