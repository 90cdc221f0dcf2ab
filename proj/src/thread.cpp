#include "learnstory/thread.hpp"

#include "learnstory/text.hpp"

namespace learnstory {

namespace {

constexpr std::size_t kMinimumRoom = 20;

void replace_all(std::string& s, std::string_view from, std::string_view to) {
    for (auto pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
        s.replace(pos, from.size(), to);
    }
}

// Greedy packing of whitespace-separated words into chunks of at most
// `budget` code points. Whitespace between words inside a chunk is kept.
std::vector<std::string_view> pack(std::string_view t, std::size_t budget) {
    std::vector<std::string_view> chunks;
    std::size_t cur_start = 0;
    std::size_t cur_end = 0;
    bool open = false;
    std::size_t i = 0;
    while (i < t.size()) {
        if (text::is_space(t[i])) {
            ++i;
            continue;
        }
        std::size_t s = i;
        std::size_t e = i;
        while (e < t.size() && !text::is_space(t[e])) {
            ++e;
        }
        i = e;
        if (open) {
            if (text::utf8_length(t.substr(cur_start, e - cur_start)) <= budget) {
                cur_end = e;
                continue;
            }
            chunks.push_back(t.substr(cur_start, cur_end - cur_start));
            open = false;
        }
        while (text::utf8_length(t.substr(s, e - s)) > budget) {
            const std::size_t cut = s + text::utf8_prefix_bytes(t.substr(s, e - s), budget);
            chunks.push_back(t.substr(s, cut - s));
            s = cut;
        }
        cur_start = s;
        cur_end = e;
        open = true;
    }
    if (open) {
        chunks.push_back(t.substr(cur_start, cur_end - cur_start));
    }
    return chunks;
}

} // namespace

std::vector<PlatformProfile> default_platform_profiles() {
    return {
        PlatformProfile{"x", 280, " ({i}/{n})"},
        PlatformProfile{"generic", 2000, " ({i}/{n})"},
    };
}

std::string render_numbering(const PlatformProfile& profile, std::size_t index, std::size_t total) {
    std::string out = profile.numbering_format;
    replace_all(out, "{i}", std::to_string(index));
    replace_all(out, "{n}", std::to_string(total));
    return out;
}

Result<void> validate_profile(const PlatformProfile& profile) {
    if (profile.name.empty()) {
        return make_error(ErrorCode::invalid_profile, "platform profile needs a name");
    }
    const auto suffix = text::utf8_length(render_numbering(profile, 1, 1));
    if (profile.char_limit < suffix + kMinimumRoom) {
        return make_error(ErrorCode::invalid_profile,
                          "char_limit of " + profile.name + " must exceed its numbering by at least 20");
    }
    return {};
}

Result<std::vector<ThreadPost>> split_into_thread(std::string_view text, const PlatformProfile& profile) {
    if (auto valid = validate_profile(profile); !valid) {
        return valid.error();
    }
    const std::string_view t = text::trim(text);
    if (t.empty()) {
        return make_error(ErrorCode::empty_story, "nothing to post");
    }
    if (text::utf8_length(t) <= profile.char_limit) {
        return std::vector<ThreadPost>{ThreadPost{1, 1, std::string(t)}};
    }

    // The post count changes the suffix width, which changes the room per
    // post. Start at two posts and grow until the count is stable; the count
    // only grows as room shrinks, so this terminates.
    std::size_t total = 2;
    std::vector<std::string_view> chunks;
    for (;;) {
        const auto suffix = text::utf8_length(render_numbering(profile, total, total));
        if (suffix >= profile.char_limit) {
            return make_error(ErrorCode::invalid_profile, "numbering leaves no room in " + profile.name);
        }
        chunks = pack(t, profile.char_limit - suffix);
        if (chunks.size() <= total) {
            break;
        }
        total = chunks.size();
    }
    total = chunks.size();

    std::vector<ThreadPost> posts;
    posts.reserve(total);
    for (std::size_t i = 0; i < total; ++i) {
        posts.push_back(ThreadPost{i + 1, total, std::string(chunks[i]) + render_numbering(profile, i + 1, total)});
    }
    return posts;
}

} // namespace learnstory
