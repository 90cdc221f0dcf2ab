#include "learnstory/url.hpp"

#include "learnstory/text.hpp"

#include <cctype>

namespace learnstory {

namespace {

bool valid_scheme(std::string_view s) {
    if (s.empty() || std::isalpha(static_cast<unsigned char>(s.front())) == 0) {
        return false;
    }
    for (char c : s) {
        const auto u = static_cast<unsigned char>(c);
        if (std::isalnum(u) == 0 && c != '+' && c != '-' && c != '.') {
            return false;
        }
    }
    return true;
}

} // namespace

std::string ParsedUrl::host() const {
    std::string_view a = authority;
    if (auto at = a.rfind('@'); at != std::string_view::npos) {
        a.remove_prefix(at + 1);
    }
    if (!a.empty() && a.front() == '[') {
        auto close = a.find(']');
        return std::string(a.substr(0, close == std::string_view::npos ? a.size() : close + 1));
    }
    if (auto colon = a.find(':'); colon != std::string_view::npos) {
        a = a.substr(0, colon);
    }
    return std::string(a);
}

std::string ParsedUrl::to_string() const {
    std::string out = scheme + "://" + authority + path;
    if (has_query) {
        out += '?';
        out += query;
    }
    if (has_fragment) {
        out += '#';
        out += fragment;
    }
    return out;
}

Result<ParsedUrl> parse_url(std::string_view url) {
    for (char c : url) {
        const auto u = static_cast<unsigned char>(c);
        if (u <= 0x20 || u == 0x7F) {
            return make_error(ErrorCode::invalid_url, "URL contains whitespace or control characters");
        }
    }
    const auto sep = url.find("://");
    if (sep == std::string_view::npos || !valid_scheme(url.substr(0, sep))) {
        return make_error(ErrorCode::invalid_url, "not an absolute URL: " + std::string(url));
    }
    ParsedUrl out;
    out.scheme = std::string(url.substr(0, sep));
    std::string_view rest = url.substr(sep + 3);

    if (auto hash = rest.find('#'); hash != std::string_view::npos) {
        out.has_fragment = true;
        out.fragment = std::string(rest.substr(hash + 1));
        rest = rest.substr(0, hash);
    }
    if (auto q = rest.find('?'); q != std::string_view::npos) {
        out.has_query = true;
        out.query = std::string(rest.substr(q + 1));
        rest = rest.substr(0, q);
    }
    const auto slash = rest.find('/');
    out.authority = std::string(rest.substr(0, slash));
    if (slash != std::string_view::npos) {
        out.path = std::string(rest.substr(slash));
    }
    if (out.host().empty()) {
        return make_error(ErrorCode::invalid_url, "URL has no host: " + std::string(url));
    }
    return out;
}

Result<std::string> normalize_url(std::string_view url) {
    auto parsed = parse_url(url);
    if (!parsed) {
        return parsed.error();
    }
    ParsedUrl p = std::move(parsed).value();
    p.scheme = text::to_lower_ascii(p.scheme);
    // Lowercase the host part only; userinfo is case-sensitive.
    if (auto at = p.authority.rfind('@'); at != std::string::npos) {
        p.authority = p.authority.substr(0, at + 1) + text::to_lower_ascii(p.authority.substr(at + 1));
    } else {
        p.authority = text::to_lower_ascii(p.authority);
    }
    while (!p.path.empty() && p.path.back() == '/') {
        p.path.pop_back();
    }
    return p.to_string();
}

std::string append_time_parameter(std::string_view url, std::int64_t seconds) {
    if (seconds == 0) {
        return std::string(url);
    }
    std::string_view fragment;
    if (auto hash = url.find('#'); hash != std::string_view::npos) {
        fragment = url.substr(hash);
        url = url.substr(0, hash);
    }
    std::string out(url);
    out += url.find('?') == std::string_view::npos ? '?' : '&';
    out += "t=" + std::to_string(seconds) + "s";
    out += fragment;
    return out;
}

} // namespace learnstory
