#pragma once

#include "learnstory/curation_store.hpp"
#include "learnstory/result.hpp"
#include "learnstory/time.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace learnstory {

inline constexpr std::array<ActivityKind, 4> kActivityKinds = {
    ActivityKind::resource_added, ActivityKind::reflection_added,
    ActivityKind::tag_created, ActivityKind::story_created};

std::string_view to_string(ActivityKind kind) noexcept;
std::optional<ActivityKind> parse_activity_kind(std::string_view s) noexcept;

/// Events older than the latest recorded one by more than this are rejected.
inline constexpr Seconds kAllowedClockSkew{60};

struct ActivityEvent {
    ActivityKind kind{ActivityKind::resource_added};
    Timestamp at{};

    bool operator==(const ActivityEvent&) const = default;
};

struct KindRecency {
    Timestamp last_at{};
    Seconds elapsed{0};

    bool operator==(const KindRecency&) const = default;
};

struct ActivitySnapshot {
    std::array<std::optional<KindRecency>, 4> per_kind{};  // indexed like kActivityKinds
    Timestamp computed_at{};

    [[nodiscard]] const std::optional<KindRecency>& of(ActivityKind kind) const noexcept {
        return per_kind[static_cast<std::size_t>(kind)];
    }
    [[nodiscard]] bool all_absent() const noexcept;
};

/// Append-only event log behind the recency view.
class ActivityLog final : public EventSink {
public:
    ActivityLog() = default;
    explicit ActivityLog(std::vector<ActivityEvent> events);

    Result<void> record_event(ActivityKind kind, Timestamp at);

    /// Per kind the latest event and now - last_at (zero if now is earlier).
    [[nodiscard]] ActivitySnapshot compute_snapshot(Timestamp now) const;

    [[nodiscard]] const std::vector<ActivityEvent>& events() const noexcept { return events_; }

    void on_event(ActivityKind kind, Timestamp at) override;

    bool operator==(const ActivityLog& other) const { return events_ == other.events_; }

private:
    std::vector<ActivityEvent> events_;
    std::optional<Timestamp> latest_;
};

struct RadarDatum {
    std::string tag_name;
    std::size_t resource_count{0};

    bool operator==(const RadarDatum&) const = default;
};

/// One datum per tag, sorted by tag name.
std::vector<RadarDatum> radar_data(const CurationStore& store);

/// Off unless the learner turns it on.
struct NudgePolicy {
    bool enabled{false};
    std::vector<std::string> watched_domains;
    Seconds staleness_threshold{std::chrono::days{3}};
    Seconds min_interval_between_nudges{std::chrono::hours{6}};

    bool operator==(const NudgePolicy&) const = default;
};

Result<void> validate_policy(const NudgePolicy& policy);

struct StoryRef {
    StoryId id;
    TagId tag_id;
    std::string title;

    bool operator==(const StoryRef&) const = default;
};

struct NudgePayload {
    ActivitySnapshot snapshot;
    std::optional<StoryRef> latest_story;
};

/// True when `host` is a watched domain or a subdomain of one.
bool host_is_watched(std::string_view host, const std::vector<std::string>& watched_domains);

/// A payload iff the policy is enabled, the host is watched, activity is
/// stale (some kind at or past the threshold, or nothing recorded at all)
/// and the previous nudge, if any, is at least min_interval old.
std::optional<NudgePayload> evaluate_nudge(std::string_view visited_host, Timestamp now,
                                           const NudgePolicy& policy, const ActivitySnapshot& snapshot,
                                           const std::optional<Timestamp>& last_nudge_at,
                                           std::optional<StoryRef> latest_story = std::nullopt);

} // namespace learnstory
