#pragma once

#include "learnstory/curation_store.hpp"
#include "learnstory/story_engine.hpp"

#include <memory>
#include <random>
#include <string>
#include <vector>

namespace learnstory::testing {

/// Settable clock shared by copies.
class ManualClock {
public:
    explicit ManualClock(Timestamp start = Timestamp{Seconds{1'700'000'000}})
        : now_(std::make_shared<Timestamp>(start)) {}

    [[nodiscard]] Clock clock() const {
        auto now = now_;
        return [now] { return *now; };
    }
    [[nodiscard]] Timestamp now() const { return *now_; }
    void set(Timestamp t) { *now_ = t; }
    void advance(Seconds s) { *now_ += s; }

private:
    std::shared_ptr<Timestamp> now_;
};

inline Timestamp day(int n) { return Timestamp{Seconds{1'700'000'000}} + std::chrono::days{n}; }

/// Word pool with punctuation, unicode and near-duplicates so generated
/// titles collide and texts exercise the exporters.
inline const std::vector<std::string>& word_pool() {
    static const std::vector<std::string> words = {
        "vue", "router", "npm", "install", "stuck", "why", "does", "v-model", "bind", "props",
        "component", "reactivity", "C++", "templates", "async", "await", "promise", "Intro",
        "intro", "guide", "café", "naïve", "日本語", "—", "(draft)", "#tags", "[link]", "t=75s",
        "hook", "state", "closures", "README", "the", "and", "of", "is", "a", "tests",
    };
    return words;
}

inline std::string random_words(std::mt19937_64& rng, int min_words, int max_words) {
    const auto& pool = word_pool();
    std::uniform_int_distribution<int> count(min_words, max_words);
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    std::string out;
    const int n = count(rng);
    for (int i = 0; i < n; ++i) {
        if (i > 0) out += ' ';
        out += pool[pick(rng)];
    }
    return out;
}

/// Reflection text, sometimes multi-line or with an embedded separator.
inline std::string random_reflection_text(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> shape(0, 9);
    std::string t = random_words(rng, 1, 14);
    switch (shape(rng)) {
        case 0: t += "\nsecond line " + random_words(rng, 1, 4); break;
        case 1: t += "\n\n  indented " + random_words(rng, 1, 3); break;
        case 2: t = "- " + t + " — " + random_words(rng, 1, 3); break;
        case 3: t += " ## Keywords"; break;
        default: break;
    }
    return t;
}

struct GeneratedStore {
    ManualClock clock;
    std::unique_ptr<CurationStore> store;
    std::vector<ResourceId> resources;
    std::vector<TagId> tags;
};

/// A randomized store: resources (some videos), reflections, tags and
/// overlapping assignments. Time advances in irregular steps, including zero.
inline GeneratedStore random_store(std::uint64_t seed, int max_resources = 8, int max_tags = 4) {
    std::mt19937_64 rng(seed);
    GeneratedStore g;
    g.store = std::make_unique<CurationStore>(g.clock.clock());
    std::uniform_int_distribution<int> step(0, 3);
    std::uniform_int_distribution<int> seconds(0, 200'000);
    auto tick = [&] {
        if (step(rng) != 0) g.clock.advance(Seconds{seconds(rng)});
    };

    std::uniform_int_distribution<int> n_res(1, max_resources);
    const int resources = n_res(rng);
    for (int i = 0; i < resources; ++i) {
        tick();
        const bool video = rng() % 3 == 0;
        const std::string url = video ? "https://www.youtube.com/watch?v=vid" + std::to_string(seed) + "x" + std::to_string(i)
                                      : "https://Docs.Example.org/s" + std::to_string(seed) + "/page" + std::to_string(i) + "/";
        auto r = g.store->add_resource(url, random_words(rng, 0, 5), video ? ResourceKind::video : ResourceKind::web_page);
        if (rng() % 2 == 0) (void)g.store->rate_resource(r->id, static_cast<int>(rng() % 5) + 1);
        g.resources.push_back(r->id);
        std::uniform_int_distribution<int> n_refl(0, 4);
        const int reflections = n_refl(rng);
        for (int k = 0; k < reflections; ++k) {
            tick();
            std::optional<std::int64_t> offset;
            if (video && rng() % 2 == 0) offset = static_cast<std::int64_t>(rng() % 4000);
            const auto kind = static_cast<ReflectionKind>(rng() % 3);
            (void)g.store->add_reflection(r->id, random_reflection_text(rng), kind, offset);
        }
    }
    std::uniform_int_distribution<int> n_tags(1, max_tags);
    const int tags = n_tags(rng);
    for (int i = 0; i < tags; ++i) {
        tick();
        auto t = g.store->create_tag("Path " + std::to_string(i) + " " + random_words(rng, 1, 2));
        g.tags.push_back(t->id);
    }
    for (const auto& tag : g.tags) {
        for (const auto& res : g.resources) {
            if (rng() % 2 == 0) {
                (void)g.store->assign_tag(tag, res);
            }
        }
    }
    return g;
}

/// A StoryInput built directly (not through a store) from random data.
inline StoryInput random_story_input(std::uint64_t seed) {
    for (std::uint64_t attempt = 0;; ++attempt) {
        auto g = random_store(seed * 7919 + attempt, 6, 1);
        for (const auto& res : g.resources) (void)g.store->assign_tag(g.tags.front(), res);
        auto input = collect_story_input(*g.store, g.tags.front());
        if (input) return std::move(input).value();
    }
}

} // namespace learnstory::testing
