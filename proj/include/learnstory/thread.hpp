#pragma once

#include "learnstory/result.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace learnstory {

/// Where a story is re-shaped for sharing. `numbering_format` is appended to
/// every post of a multi-post thread with "{i}" and "{n}" replaced by the
/// post index and total.
struct PlatformProfile {
    std::string name;
    std::size_t char_limit{280};
    std::string numbering_format{" ({i}/{n})"};

    bool operator==(const PlatformProfile&) const = default;
};

struct ThreadPost {
    std::size_t index{1};
    std::size_t total{1};
    std::string body;

    bool operator==(const ThreadPost&) const = default;
};

/// "x" (280, " ({i}/{n})") and "generic" (2000).
std::vector<PlatformProfile> default_platform_profiles();

std::string render_numbering(const PlatformProfile& profile, std::size_t index, std::size_t total);

/// The limit must leave at least 20 characters beside a rendered suffix.
Result<void> validate_profile(const PlatformProfile& profile);

/// Greedy split at whitespace. Each body (content plus numbering) is at most
/// char_limit code points; whitespace at split points is dropped; a word
/// longer than the room in a post is cut at code point boundaries. Text that
/// fits in one post comes back unnumbered.
Result<std::vector<ThreadPost>> split_into_thread(std::string_view text, const PlatformProfile& profile);

} // namespace learnstory
