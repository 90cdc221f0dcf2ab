#include "learnstory/activity.hpp"

#include "support/test_support.hpp"

#include <doctest.h>

#include <map>
#include <random>

using namespace learnstory;
using learnstory::testing::day;
using learnstory::testing::ManualClock;
using std::chrono::days;
using std::chrono::hours;

namespace {

NudgePolicy enabled_policy() {
    NudgePolicy p;
    p.enabled = true;
    p.watched_domains = {"twitter.com", "x.com"};
    p.staleness_threshold = days{2};
    p.min_interval_between_nudges = hours{6};
    return p;
}

ActivitySnapshot snapshot_with(ActivityKind kind, Timestamp last, Timestamp now) {
    ActivityLog log;
    (void)log.record_event(kind, last);
    return log.compute_snapshot(now);
}

} // namespace

TEST_CASE("snapshot arithmetic") {
    ActivityLog log;
    REQUIRE(log.record_event(ActivityKind::resource_added, day(0)));
    REQUIRE(log.record_event(ActivityKind::reflection_added, day(2) + hours{12}));
    const auto snap = log.compute_snapshot(day(3));
    REQUIRE(snap.of(ActivityKind::resource_added));
    CHECK(snap.of(ActivityKind::resource_added)->elapsed == days{3});
    CHECK(snap.of(ActivityKind::reflection_added)->elapsed == hours{12});
    CHECK_FALSE(snap.of(ActivityKind::tag_created));
    CHECK_FALSE(snap.of(ActivityKind::story_created));
    CHECK(snap.computed_at == day(3));
    CHECK_FALSE(snap.all_absent());
    CHECK(ActivityLog{}.compute_snapshot(day(1)).all_absent());
}

TEST_CASE("latest event per kind wins and elapsed is never negative") {
    ActivityLog log;
    REQUIRE(log.record_event(ActivityKind::tag_created, day(1)));
    REQUIRE(log.record_event(ActivityKind::tag_created, day(2)));
    REQUIRE(log.record_event(ActivityKind::tag_created, day(2) - Seconds{30}));
    auto snap = log.compute_snapshot(day(4));
    CHECK(snap.of(ActivityKind::tag_created)->last_at == day(2));
    CHECK(snap.of(ActivityKind::tag_created)->elapsed == days{2});
    CHECK(log.compute_snapshot(day(1)).of(ActivityKind::tag_created)->elapsed == Seconds{0});
}

TEST_CASE("events far behind the latest one are rejected") {
    ActivityLog log;
    REQUIRE(log.record_event(ActivityKind::resource_added, day(5)));
    CHECK(log.record_event(ActivityKind::resource_added, day(5) - Seconds{60}));
    auto late = log.record_event(ActivityKind::story_created, day(5) - Seconds{61});
    REQUIRE_FALSE(late);
    CHECK(late.error().code == ErrorCode::clock_skew);
    CHECK(log.events().size() == 2);
}

TEST_CASE("snapshot matches a brute-force recomputation") {
    std::mt19937_64 rng(5);
    for (int iter = 0; iter < 200; ++iter) {
        ActivityLog log;
        std::map<int, Timestamp> latest;
        Timestamp t = day(0);
        const int n = static_cast<int>(rng() % 30);
        for (int i = 0; i < n; ++i) {
            t += Seconds{static_cast<long>(rng() % 100000)};
            const int k = static_cast<int>(rng() % 4);
            REQUIRE(log.record_event(kActivityKinds[k], t));
            latest[k] = t;
        }
        const Timestamp now = t + Seconds{static_cast<long>(rng() % 500000)};
        const auto snap = log.compute_snapshot(now);
        for (int k = 0; k < 4; ++k) {
            const auto& slot = snap.of(kActivityKinds[k]);
            if (latest.contains(k)) {
                REQUIRE(slot);
                CHECK(slot->last_at == latest[k]);
                CHECK(slot->elapsed == now - latest[k]);
            } else {
                CHECK_FALSE(slot);
            }
        }
    }
}

TEST_CASE("store operations feed the log") {
    ManualClock clock(day(0));
    CurationStore store(clock.clock());
    ActivityLog log;
    store.set_event_sink(&log);
    auto r = store.add_resource("https://a.org", "A", ResourceKind::web_page);
    clock.advance(days{1});
    (void)store.add_resource("https://a.org", "A again", ResourceKind::web_page);
    (void)store.add_reflection(r->id, "note");
    auto snap = log.compute_snapshot(day(3));
    CHECK(snap.of(ActivityKind::resource_added)->elapsed == days{3});
    CHECK(snap.of(ActivityKind::reflection_added)->elapsed == days{2});
    CHECK(log.events().size() == 2);
}

TEST_CASE("activity kind names") {
    for (auto kind : kActivityKinds) CHECK(parse_activity_kind(to_string(kind)) == kind);
    CHECK(to_string(ActivityKind::reflection_added) == "reflection_added");
    CHECK_FALSE(parse_activity_kind("coffee_break"));
}

TEST_CASE("radar counts follow merges") {
    ManualClock clock(day(0));
    CurationStore store(clock.clock());
    auto a = store.create_tag("b-tag");
    auto b = store.create_tag("a-tag");
    std::vector<ResourceId> ids;
    for (int i = 0; i < 4; ++i) ids.push_back(store.add_resource("https://r.org/" + std::to_string(i), "r",
                                                                 ResourceKind::web_page)->id);
    (void)store.assign_tag(a->id, ids[0]);
    (void)store.assign_tag(a->id, ids[1]);
    (void)store.assign_tag(b->id, ids[1]);
    (void)store.assign_tag(b->id, ids[2]);
    CHECK(radar_data(store) == std::vector<RadarDatum>{{"a-tag", 2}, {"b-tag", 2}});
    (void)store.merge_tags(a->id, b->id);
    CHECK(radar_data(store) == std::vector<RadarDatum>{{"a-tag", 3}});
}

TEST_CASE("radar after random merges matches recomputed assignment sets") {
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        auto g = learnstory::testing::random_store(seed, 8, 5);
        std::mt19937_64 rng(seed);
        std::map<TagId, std::set<ResourceId>> members;
        for (const auto& asg : g.store->assignments()) members[asg.tag_id].insert(asg.resource_id);
        auto live = g.tags;
        while (live.size() > 1 && rng() % 3 != 0) {
            const auto s = rng() % live.size();
            auto t = rng() % live.size();
            if (s == t) t = (t + 1) % live.size();
            REQUIRE(g.store->merge_tags(live[s], live[t]));
            members[live[t]].insert(members[live[s]].begin(), members[live[s]].end());
            members.erase(live[s]);
            live.erase(live.begin() + static_cast<long>(s));
        }
        std::vector<RadarDatum> expected;
        for (const auto& id : live) expected.push_back({g.store->find_tag(id)->name, members[id].size()});
        std::sort(expected.begin(), expected.end(), [](const auto& x, const auto& y) { return x.tag_name < y.tag_name; });
        CHECK(radar_data(*g.store) == expected);
    }
}

TEST_CASE("nudge decision cases") {
    const auto policy = enabled_policy();
    const auto stale = snapshot_with(ActivityKind::reflection_added, day(0), day(5));
    const auto fresh = snapshot_with(ActivityKind::reflection_added, day(5) - hours{1}, day(5));
    const StoryRef ref{StoryId{"story-000001"}, TagId{"tag-000001"}, "My story"};

    auto payload = evaluate_nudge("twitter.com", day(5), policy, stale, std::nullopt, ref);
    REQUIRE(payload);
    CHECK(payload->latest_story == ref);
    CHECK(payload->snapshot.of(ActivityKind::reflection_added)->elapsed == days{5});

    CHECK_FALSE(evaluate_nudge("twitter.com", day(5), policy, fresh, std::nullopt));
    CHECK_FALSE(evaluate_nudge("docs.python.org", day(5), policy, stale, std::nullopt));
    CHECK_FALSE(evaluate_nudge("twitter.com", day(5), policy, stale, day(5) - hours{2}));
    CHECK(evaluate_nudge("twitter.com", day(5), policy, stale, day(5) - hours{6}));
    CHECK(evaluate_nudge("twitter.com", day(5), policy, ActivitySnapshot{}, std::nullopt));
    // exactly at the threshold counts as stale
    CHECK(evaluate_nudge("x.com", day(2), policy, snapshot_with(ActivityKind::tag_created, day(0), day(2)), std::nullopt));

    auto off = policy;
    off.enabled = false;
    CHECK_FALSE(evaluate_nudge("twitter.com", day(5), off, stale, std::nullopt));
}

TEST_CASE("watched hosts") {
    const std::vector<std::string> watched{"Twitter.com", " x.com "};
    CHECK(host_is_watched("twitter.com", watched));
    CHECK(host_is_watched("mobile.twitter.com", watched));
    CHECK(host_is_watched("X.COM", watched));
    CHECK_FALSE(host_is_watched("nottwitter.com", watched));
    CHECK_FALSE(host_is_watched("twitter.com.evil.org", watched));
    CHECK_FALSE(host_is_watched("", watched));
    CHECK_FALSE(host_is_watched("x.com", {}));
}

TEST_CASE("policy validation") {
    CHECK(validate_policy(NudgePolicy{}));
    CHECK_FALSE(NudgePolicy{}.enabled);
    auto p = enabled_policy();
    p.min_interval_between_nudges = Seconds{0};
    CHECK(validate_policy(p).error().code == ErrorCode::invalid_config);
}

TEST_CASE("disabled policy never nudges") {
    std::mt19937_64 rng(23);
    const std::vector<std::string> hosts{"twitter.com", "x.com", "www.reddit.com", "", "example.org"};
    for (int i = 0; i < 1000; ++i) {
        NudgePolicy p;
        p.enabled = false;
        p.watched_domains = {hosts[rng() % hosts.size()], hosts[rng() % hosts.size()]};
        p.staleness_threshold = Seconds{static_cast<long>(rng() % 400000 + 1)};
        p.min_interval_between_nudges = Seconds{static_cast<long>(rng() % 100000 + 1)};
        ActivityLog log;
        const int n = static_cast<int>(rng() % 5);
        for (int k = 0; k < n; ++k) (void)log.record_event(kActivityKinds[rng() % 4], day(0) + Seconds{static_cast<long>(rng() % 900000)});
        const auto now = day(0) + Seconds{static_cast<long>(rng() % 2000000)};
        std::optional<Timestamp> last;
        if (rng() % 2) last = now - Seconds{static_cast<long>(rng() % 200000)};
        CHECK_FALSE(evaluate_nudge(hosts[rng() % hosts.size()], now, p, log.compute_snapshot(now), last));
    }
}

TEST_CASE("honest clients are rate limited") {
    std::mt19937_64 rng(29);
    for (int iter = 0; iter < 200; ++iter) {
        auto policy = enabled_policy();
        policy.min_interval_between_nudges = Seconds{static_cast<long>(rng() % 50000 + 1)};
        ActivityLog log;
        (void)log.record_event(ActivityKind::resource_added, day(0));
        const Timestamp start = day(10);
        const Seconds interval{static_cast<long>(rng() % 500000 + 1)};
        std::optional<Timestamp> last;
        std::size_t payloads = 0;
        for (Timestamp t = start; t < start + interval; t += Seconds{static_cast<long>(rng() % 3000 + 1)}) {
            if (evaluate_nudge("x.com", t, policy, log.compute_snapshot(t), last)) {
                ++payloads;
                last = t;
            }
        }
        const auto bound = static_cast<std::size_t>((interval.count() + policy.min_interval_between_nudges.count() - 1) /
                                                    policy.min_interval_between_nudges.count());
        CHECK(payloads <= bound);
        CHECK(payloads >= 1);
    }
}
