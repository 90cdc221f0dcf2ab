#include "learnstory/text.hpp"

#include <cctype>

namespace learnstory::text {

bool is_space(char c) noexcept {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::string_view trim(std::string_view s) noexcept {
    while (!s.empty() && is_space(s.front())) {
        s.remove_prefix(1);
    }
    while (!s.empty() && is_space(s.back())) {
        s.remove_suffix(1);
    }
    return s;
}

std::string to_lower_ascii(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') {
            c = static_cast<char>(c - 'A' + 'a');
        }
    }
    return out;
}

namespace {

std::string join_runs(std::string_view s, char separator) {
    std::string out;
    bool pending = false;
    for (char c : trim(s)) {
        if (is_space(c)) {
            pending = true;
            continue;
        }
        if (pending) {
            out += separator;
            pending = false;
        }
        out += c;
    }
    return out;
}

} // namespace

std::string collapse_whitespace(std::string_view s) { return join_runs(s, ' '); }

std::string normalize_tag_name(std::string_view name) { return to_lower_ascii(join_runs(name, '-')); }

std::string slugify(std::string_view s) {
    std::string out;
    bool pending = false;
    for (char c : s) {
        const auto u = static_cast<unsigned char>(c);
        if (std::isalnum(u) != 0 && u < 0x80) {
            if (pending && !out.empty()) {
                out += '-';
            }
            pending = false;
            out += static_cast<char>(std::tolower(u));
        } else {
            pending = true;
        }
    }
    return out;
}

std::size_t utf8_length(std::string_view s) noexcept {
    std::size_t n = 0;
    for (char c : s) {
        if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) {
            ++n;
        }
    }
    return n;
}

std::size_t utf8_prefix_bytes(std::string_view s, std::size_t count) noexcept {
    std::size_t seen = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if ((static_cast<unsigned char>(s[i]) & 0xC0) != 0x80) {
            if (seen == count) {
                return i;
            }
            ++seen;
        }
    }
    return s.size();
}

} // namespace learnstory::text
