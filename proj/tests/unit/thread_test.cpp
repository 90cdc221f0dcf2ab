#include "learnstory/thread.hpp"
#include "learnstory/text.hpp"

#include <doctest.h>

#include <random>
#include <sstream>

using namespace learnstory;

namespace {

const PlatformProfile kX{"x", 280, " ({i}/{n})"};

std::size_t cp(std::string_view s) { return text::utf8_length(s); }

// Reference splitter for single-space-separated ASCII text: greedy word
// packing with the suffix width taken from the final post count.
std::vector<std::string> oracle_split(const std::string& text, std::size_t limit) {
    std::vector<std::string> words;
    std::istringstream in(text);
    for (std::string w; in >> w;) words.push_back(w);
    if (text.size() <= limit) return {text};
    for (std::size_t n = 2;; ++n) {
        const std::size_t budget = limit - (std::string(" (") + std::to_string(n) + "/" + std::to_string(n) + ")").size();
        std::vector<std::string> chunks;
        std::string cur;
        for (std::string w : words) {
            if (!cur.empty() && cur.size() + 1 + w.size() <= budget) {
                cur += " " + w;
                continue;
            }
            if (!cur.empty()) chunks.push_back(cur);
            cur.clear();
            while (w.size() > budget) {
                chunks.push_back(w.substr(0, budget));
                w = w.substr(budget);
            }
            cur = w;
        }
        if (!cur.empty()) chunks.push_back(cur);
        if (chunks.size() <= n) {
            for (std::size_t i = 0; i < chunks.size(); ++i)
                chunks[i] += " (" + std::to_string(i + 1) + "/" + std::to_string(chunks.size()) + ")";
            return chunks;
        }
    }
}

// Strips each numbering suffix and checks that the contents, in order, cover
// the original text with only whitespace dropped between posts.
bool reconstructs(std::string_view original, const std::vector<ThreadPost>& posts, const PlatformProfile& profile) {
    const std::string_view t = text::trim(original);
    std::size_t pos = 0;
    for (const auto& post : posts) {
        std::string_view body = post.body;
        if (posts.size() > 1) {
            const std::string suffix = render_numbering(profile, post.index, post.total);
            if (!body.ends_with(suffix)) return false;
            body.remove_suffix(suffix.size());
        }
        while (pos < t.size() && text::is_space(t[pos])) ++pos;
        if (body.empty() || t.substr(pos, body.size()) != body) return false;
        pos += body.size();
    }
    return pos == t.size();
}

std::string random_text(std::mt19937_64& rng, std::size_t approx_len) {
    static const std::vector<std::string> pool = {"learning", "vue", "npm", "I", "was", "stuck", "on", "café",
                                                  "日本語の", "reactivity", "—", "x", "supercalifragilistic",
                                                  "https://example.org/a/very/long/path?with=query"};
    std::string out;
    while (out.size() < approx_len) {
        if (!out.empty()) {
            switch (rng() % 8) {
                case 0: out += "\n"; break;
                case 1: out += "  "; break;
                case 2: out += "\n\n"; break;
                default: out += " "; break;
            }
        }
        if (rng() % 40 == 0) {
            out += std::string(rng() % 600 + 1, 'w');
        } else {
            out += pool[rng() % pool.size()];
        }
    }
    return out;
}

} // namespace

TEST_CASE("short text is a single unnumbered post") {
    const std::string text(100, 'a');
    auto posts = split_into_thread(text, kX);
    REQUIRE(posts);
    REQUIRE(posts->size() == 1);
    CHECK((*posts)[0].body == text);
    CHECK((*posts)[0].index == 1);
    CHECK((*posts)[0].total == 1);
}

TEST_CASE("exactly the limit still fits in one post") {
    const std::string text(280, 'b');
    CHECK(split_into_thread(text, kX)->size() == 1);
    CHECK(split_into_thread(text + "b", kX)->size() == 2);
}

TEST_CASE("700-character story matches the reference splitter") {
    std::string text;
    std::mt19937_64 rng(3);
    static const char* words[] = {"vue", "router", "props", "reactivity", "learning", "npm", "stuck", "install"};
    while (text.size() < 700) {
        if (!text.empty()) text += ' ';
        text += words[rng() % 8];
    }
    text.resize(700);
    while (text.back() == ' ') text.pop_back();
    const auto expected = oracle_split(text, 280);
    REQUIRE(expected.size() == 3);
    auto posts = split_into_thread(text, kX);
    REQUIRE(posts);
    REQUIRE(posts->size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
        CHECK((*posts)[i].body == expected[i]);
        CHECK((*posts)[i].index == i + 1);
        CHECK((*posts)[i].total == 3);
        CHECK(cp((*posts)[i].body) <= 280);
    }
    CHECK((*posts)[0].body.ends_with(" (1/3)"));
    CHECK(reconstructs(text, *posts, kX));
}

TEST_CASE("a 300-character word is hard-split") {
    const std::string word(300, 'z');
    auto posts = split_into_thread(word, kX);
    REQUIRE(posts);
    REQUIRE(posts->size() == 2);
    CHECK((*posts)[0].body == std::string(274, 'z') + " (1/2)");
    CHECK((*posts)[1].body == std::string(26, 'z') + " (2/2)");
    CHECK(reconstructs(word, *posts, kX));
}

TEST_CASE("hard splits respect code point boundaries") {
    std::string word;
    for (int i = 0; i < 150; ++i) word += "日";
    PlatformProfile p{"p", 100, " ({i}/{n})"};
    auto posts = split_into_thread(word, p);
    REQUIRE(posts);
    std::size_t total = 0;
    for (const auto& post : *posts) {
        CHECK(cp(post.body) <= 100);
        total += cp(post.body) - cp(render_numbering(p, post.index, post.total));
    }
    CHECK(total == 150);
    CHECK(reconstructs(word, *posts, p));
}

TEST_CASE("profile validation") {
    CHECK(validate_profile(kX));
    CHECK(validate_profile(PlatformProfile{"", 280, ""}).error().code == ErrorCode::invalid_profile);
    CHECK(validate_profile(PlatformProfile{"tiny", 25, " ({i}/{n})"}).error().code == ErrorCode::invalid_profile);
    CHECK(validate_profile(PlatformProfile{"edge", 26, " ({i}/{n})"}));
    CHECK(split_into_thread("hello", PlatformProfile{"tiny", 10, " ({i}/{n})"}).error().code == ErrorCode::invalid_profile);
    CHECK(split_into_thread(" \n\t ", kX).error().code == ErrorCode::empty_story);
    CHECK(render_numbering(kX, 3, 12) == " (3/12)");
    CHECK(render_numbering(PlatformProfile{"c", 50, " [{i} of {n}] {i}"}, 2, 5) == " [2 of 5] 2");
}

TEST_CASE("numbering widens when the post count reaches two digits") {
    PlatformProfile p{"p", 40, " ({i}/{n})"};
    std::string text;
    for (int i = 0; i < 120; ++i) text += (i ? " " : "") + std::string("abcdefg");
    const auto expected = oracle_split(text, 40);
    REQUIRE(expected.size() >= 10);
    auto posts = split_into_thread(text, p);
    REQUIRE(posts);
    REQUIRE(posts->size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) CHECK((*posts)[i].body == expected[i]);
}

TEST_CASE("thread properties over random texts and limits") {
    std::mt19937_64 rng(11);
    for (int iter = 0; iter < 400; ++iter) {
        const std::size_t limit = 40 + rng() % 461;
        const PlatformProfile p{"p", limit, " ({i}/{n})"};
        const std::string text = random_text(rng, rng() % 3000 + 1);
        auto posts = split_into_thread(text, p);
        REQUIRE(posts);
        REQUIRE_FALSE(posts->empty());
        for (std::size_t i = 0; i < posts->size(); ++i) {
            const auto& post = (*posts)[i];
            CHECK(cp(post.body) <= limit);
            CHECK(post.index == i + 1);
            CHECK(post.total == posts->size());
        }
        CHECK(reconstructs(text, *posts, p));
        if (cp(text::trim(text)) <= limit) CHECK(posts->size() == 1);
    }
}

TEST_CASE("single-space ASCII texts match the reference splitter") {
    std::mt19937_64 rng(19);
    for (int iter = 0; iter < 300; ++iter) {
        const std::size_t limit = 40 + rng() % 461;
        std::string text;
        const std::size_t len = rng() % 2500 + 1;
        while (text.size() < len) {
            if (!text.empty()) text += ' ';
            text += std::string(rng() % 12 == 0 ? rng() % 700 + 1 : rng() % 9 + 1, static_cast<char>('a' + rng() % 26));
        }
        const auto expected = oracle_split(text, limit);
        auto posts = split_into_thread(text, PlatformProfile{"p", limit, " ({i}/{n})"});
        REQUIRE(posts);
        REQUIRE(posts->size() == expected.size());
        for (std::size_t i = 0; i < expected.size(); ++i) CHECK((*posts)[i].body == expected[i]);
    }
}
