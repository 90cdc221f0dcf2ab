#include "learnstory/activity.hpp"

#include "learnstory/text.hpp"

#include <algorithm>
#include <map>

namespace learnstory {

std::string_view to_string(ActivityKind kind) noexcept {
    switch (kind) {
        case ActivityKind::resource_added: return "resource_added";
        case ActivityKind::reflection_added: return "reflection_added";
        case ActivityKind::tag_created: return "tag_created";
        case ActivityKind::story_created: return "story_created";
    }
    return "resource_added";
}

std::optional<ActivityKind> parse_activity_kind(std::string_view s) noexcept {
    for (auto kind : kActivityKinds) {
        if (to_string(kind) == s) {
            return kind;
        }
    }
    return std::nullopt;
}

bool ActivitySnapshot::all_absent() const noexcept {
    return std::none_of(per_kind.begin(), per_kind.end(), [](const auto& k) { return k.has_value(); });
}

ActivityLog::ActivityLog(std::vector<ActivityEvent> events) : events_(std::move(events)) {
    for (const auto& e : events_) {
        latest_ = latest_ ? std::max(*latest_, e.at) : e.at;
    }
}

Result<void> ActivityLog::record_event(ActivityKind kind, Timestamp at) {
    if (latest_ && at < *latest_ - kAllowedClockSkew) {
        return make_error(ErrorCode::clock_skew, "event at " + format_iso8601(at) + " precedes latest event at " +
                                                     format_iso8601(*latest_) + " by more than 60s");
    }
    events_.push_back(ActivityEvent{kind, at});
    latest_ = latest_ ? std::max(*latest_, at) : at;
    return {};
}

void ActivityLog::on_event(ActivityKind kind, Timestamp at) {
    // Store stamps are monotone, so this cannot hit the skew check.
    (void)record_event(kind, at);
}

ActivitySnapshot ActivityLog::compute_snapshot(Timestamp now) const {
    ActivitySnapshot snap;
    snap.computed_at = now;
    for (const auto& e : events_) {
        auto& slot = snap.per_kind[static_cast<std::size_t>(e.kind)];
        if (!slot || e.at > slot->last_at) {
            slot = KindRecency{e.at, {}};
        }
    }
    for (auto& slot : snap.per_kind) {
        if (slot) {
            slot->elapsed = std::max(Seconds{0}, now - slot->last_at);
        }
    }
    return snap;
}

std::vector<RadarDatum> radar_data(const CurationStore& store) {
    std::vector<RadarDatum> out;
    for (const auto& tag : store.tags()) {
        out.push_back(RadarDatum{tag.name, store.assignment_count(tag.id)});
    }
    return out;
}

Result<void> validate_policy(const NudgePolicy& policy) {
    if (policy.staleness_threshold <= Seconds{0} || policy.min_interval_between_nudges <= Seconds{0}) {
        return make_error(ErrorCode::invalid_config, "nudge thresholds must be positive durations");
    }
    return {};
}

bool host_is_watched(std::string_view host, const std::vector<std::string>& watched_domains) {
    const std::string h = text::to_lower_ascii(text::trim(host));
    if (h.empty()) {
        return false;
    }
    for (const auto& raw : watched_domains) {
        const std::string d = text::to_lower_ascii(text::trim(raw));
        if (d.empty()) {
            continue;
        }
        if (h == d || (h.size() > d.size() && h.ends_with(d) && h[h.size() - d.size() - 1] == '.')) {
            return true;
        }
    }
    return false;
}

std::optional<NudgePayload> evaluate_nudge(std::string_view visited_host, Timestamp now, const NudgePolicy& policy,
                                           const ActivitySnapshot& snapshot,
                                           const std::optional<Timestamp>& last_nudge_at,
                                           std::optional<StoryRef> latest_story) {
    if (!policy.enabled || !host_is_watched(visited_host, policy.watched_domains)) {
        return std::nullopt;
    }
    const bool stale = snapshot.all_absent() ||
                       std::any_of(snapshot.per_kind.begin(), snapshot.per_kind.end(), [&](const auto& k) {
                           return k && k->elapsed >= policy.staleness_threshold;
                       });
    if (!stale) {
        return std::nullopt;
    }
    if (last_nudge_at && now - *last_nudge_at < policy.min_interval_between_nudges) {
        return std::nullopt;
    }
    return NudgePayload{snapshot, std::move(latest_story)};
}

} // namespace learnstory
