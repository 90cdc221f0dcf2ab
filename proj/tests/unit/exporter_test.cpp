#include "learnstory/exporter.hpp"
#include "learnstory/story_engine.hpp"

#include "support/test_support.hpp"

#include <doctest.h>

using namespace learnstory;
using learnstory::testing::day;
using learnstory::testing::ManualClock;

namespace {

struct Fixture {
    ManualClock clock{day(0)};
    CurationStore store{clock.clock()};
    TagId tag;

    Fixture() {
        tag = store.create_tag("Vue Basics")->id;
        for (int i = 0; i < 3; ++i) {
            clock.advance(Seconds{3600});
            auto r = store.add_resource("https://site.org/p" + std::to_string(i), "Page " + std::to_string(i),
                                        ResourceKind::web_page);
            (void)store.assign_tag(tag, r->id);
        }
    }
};

class FailingHost final : public RepoHostClient {
public:
    Result<std::string> ensure_repository(const std::string&, bool) override {
        return make_error(ErrorCode::remote_failure, "host unreachable");
    }
    Result<void> write_file(const std::string&, const std::string&, const std::string&) override { return {}; }
};

} // namespace

TEST_CASE("README is the latest story when one exists") {
    Fixture f;
    auto r = f.store.resources_by_tag(f.tag)->front();
    (void)f.store.add_reflection(r.id, "what is a ref?", ReflectionKind::question);
    auto story = generate_and_store_story(f.store, *collect_story_input(f.store, f.tag), nullptr, true);
    auto layout = build_repo_layout(f.store, f.tag, *story);
    REQUIRE(layout);
    CHECK(layout->repo_name == "vue-basics");
    CHECK(layout->files.front().first == "README.md");
    CHECK(*layout->find("README.md") == serialize_story(*story));
    CHECK(layout->files.size() == 4);
}

TEST_CASE("README is an in-progress note without a story") {
    Fixture f;
    auto layout = build_repo_layout(f.store, f.tag, std::nullopt);
    REQUIRE(layout);
    const std::string& readme = *layout->find("README.md");
    CHECK(readme.find(kInProgressMarker) != std::string::npos);
    CHECK(readme.find("3 resources") != std::string::npos);
    for (int i = 1; i <= 3; ++i) {
        CHECK(readme.find(format_iso8601(day(0) + Seconds{3600 * i})) != std::string::npos);
    }
    CHECK(readme.find(format_iso8601(day(0) + Seconds{3600})) < readme.find(format_iso8601(day(0) + Seconds{7200})));
}

TEST_CASE("build_repo_layout errors") {
    Fixture f;
    CHECK(build_repo_layout(f.store, TagId{"tag-999"}, std::nullopt).error().code == ErrorCode::unknown_tag);
    auto empty = f.store.create_tag("empty");
    CHECK(build_repo_layout(f.store, empty->id, std::nullopt).error().code == ErrorCode::empty_tag);
}

TEST_CASE("colliding titles get numbered slugs") {
    ManualClock clock(day(0));
    CurationStore store(clock.clock());
    auto tag = store.create_tag("t");
    for (const char* url : {"https://a.org", "https://b.org", "https://c.org"}) {
        clock.advance(Seconds{1});
        auto r = store.add_resource(url, "Intro", ResourceKind::web_page);
        (void)store.assign_tag(tag->id, r->id);
    }
    clock.advance(Seconds{1});
    auto readme = store.add_resource("https://d.org", "Readme", ResourceKind::web_page);
    (void)store.assign_tag(tag->id, readme->id);
    clock.advance(Seconds{1});
    auto blank = store.add_resource("https://e.org", "日本語", ResourceKind::web_page);
    (void)store.assign_tag(tag->id, blank->id);

    auto layout = build_repo_layout(store, tag->id, std::nullopt);
    REQUIRE(layout);
    std::vector<std::string> paths;
    for (const auto& [p, c] : layout->files) paths.push_back(p);
    CHECK(paths == std::vector<std::string>{"README.md", "intro.md", "intro-2.md", "intro-3.md", "readme-2.md",
                                            "resource.md"});
}

TEST_CASE("resource file rendering") {
    ManualClock clock(day(0));
    CurationStore store(clock.clock());
    auto video = store.add_resource("https://www.youtube.com/watch?v=abc", "Vue in 100s", ResourceKind::video);
    (void)store.rate_resource(video->id, 4);
    clock.advance(Seconds{10});
    (void)store.add_reflection(video->id, "second", ReflectionKind::note, 75);
    clock.advance(Seconds{10});
    (void)store.add_reflection(video->id, "third\nspans lines", ReflectionKind::question);
    auto file = render_resource_file(*store.find_resource(video->id), store.reflections_for(video->id));
    CHECK(file.rfind("# Vue in 100s\n", 0) == 0);
    CHECK(file.find("Link: https://www.youtube.com/watch?v=abc\n") != std::string::npos);
    CHECK(file.find("Rating: 4/5\n") != std::string::npos);
    CHECK(file.find("t=75s") != std::string::npos);
    CHECK(file.find("[▶ 1:15]") != std::string::npos);
    CHECK(file.find("- " + format_iso8601(day(0) + Seconds{10}) + " — second") != std::string::npos);
    CHECK(file.find("second") < file.find("third"));
    CHECK(file.find("third\n  spans lines") != std::string::npos);

    auto bare = store.add_resource("https://quiet.org", "Quiet", ResourceKind::web_page);
    auto quiet = render_resource_file(*bare, {});
    CHECK(quiet.find("## Reflections") == std::string::npos);
    CHECK(quiet.find("Rating") == std::string::npos);
}

TEST_CASE("layout round-trips through parse_repo_layout") {
    for (std::uint64_t seed = 0; seed < 120; ++seed) {
        auto g = learnstory::testing::random_store(seed);
        for (const auto& tag : g.tags) {
            for (int with_story = 0; with_story < 2; ++with_story) {
                std::optional<Story> story;
                if (with_story == 1) {
                    auto input = collect_story_input(*g.store, tag);
                    if (!input) continue;
                    story = *fallback_generate(*input);
                }
                auto layout = build_repo_layout(*g.store, tag, story);
                if (!layout) {
                    CHECK(layout.error().code == ErrorCode::empty_tag);
                    continue;
                }
                auto parsed = parse_repo_layout(*layout);
                REQUIRE_MESSAGE(parsed, parsed.error().describe());
                CHECK(*parsed == *export_content(*g.store, tag, story));
            }
        }
    }
}

TEST_CASE("malformed layouts are rejected") {
    Fixture f;
    auto good = *build_repo_layout(f.store, f.tag, std::nullopt);

    auto no_readme = good;
    no_readme.files.erase(no_readme.files.begin());
    CHECK(parse_repo_layout(no_readme).error().code == ErrorCode::malformed_layout);

    auto bad_readme = good;
    bad_readme.files[0].second = "just some text\n";
    CHECK(parse_repo_layout(bad_readme).error().code == ErrorCode::malformed_layout);

    auto bad_path = good;
    bad_path.files.emplace_back("notes.txt", "# x\n");
    CHECK(parse_repo_layout(bad_path).error().code == ErrorCode::malformed_layout);

    auto bad_entry = good;
    bad_entry.files[1].second += "\n## Reflections\n\n- yesterday - forgot the format\n";
    CHECK(parse_repo_layout(bad_entry).error().code == ErrorCode::malformed_layout);

    auto no_link = good;
    no_link.files[1].second = "# Page 0\n\nAdded: 2023-11-14T22:13:20Z\n";
    CHECK(parse_repo_layout(no_link).error().code == ErrorCode::malformed_layout);
}

TEST_CASE("push writes every file") {
    Fixture f;
    auto layout = *build_repo_layout(f.store, f.tag, std::nullopt);
    InMemoryRepoHost host;
    ManualClock clock(day(5));
    auto receipt = push_repository(layout, host, true, clock.clock());
    REQUIRE(receipt);
    CHECK(receipt->remote_url == "memory://vue-basics");
    CHECK(receipt->files_written == layout.files.size());
    CHECK(receipt->pushed_at == day(5));
    const auto* repo = host.repo("vue-basics");
    REQUIRE(repo);
    CHECK(repo->private_repo);
    CHECK(repo->files == layout.files);
}

TEST_CASE("a failed write yields no receipt and a retry converges") {
    Fixture f;
    auto layout = *build_repo_layout(f.store, f.tag, std::nullopt);
    InMemoryRepoHost host;
    host.fail_on_write(2);
    auto failed = push_repository(layout, host);
    REQUIRE_FALSE(failed);
    CHECK(failed.error().code == ErrorCode::remote_failure);

    auto retry = push_repository(layout, host);
    REQUIRE(retry);
    CHECK(host.repo("vue-basics")->files == layout.files);

    auto again = push_repository(layout, host);
    REQUIRE(again);
    CHECK(host.repo("vue-basics")->files == layout.files);

    FailingHost down;
    CHECK(push_repository(layout, down).error().code == ErrorCode::remote_failure);
}
