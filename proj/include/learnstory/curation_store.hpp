#pragma once

#include "learnstory/ids.hpp"
#include "learnstory/result.hpp"
#include "learnstory/time.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace learnstory {

enum class ResourceKind { web_page, video, other };
enum class ReflectionKind { note, question, intention };

std::string_view to_string(ResourceKind kind) noexcept;
std::string_view to_string(ReflectionKind kind) noexcept;
std::optional<ResourceKind> parse_resource_kind(std::string_view s) noexcept;
std::optional<ReflectionKind> parse_reflection_kind(std::string_view s) noexcept;

struct Resource {
    ResourceId id;
    std::string url;
    std::string title;
    ResourceKind kind{ResourceKind::web_page};
    Timestamp added_at{};
    std::optional<int> rating;

    bool operator==(const Resource&) const = default;
};

struct Reflection {
    ReflectionId id;
    ResourceId resource_id;
    std::string text;
    ReflectionKind kind{ReflectionKind::note};
    Timestamp created_at{};
    std::optional<std::int64_t> video_offset;

    bool operator==(const Reflection&) const = default;
};

struct Tag {
    TagId id;
    std::string name;
    Timestamp created_at{};

    bool operator==(const Tag&) const = default;
};

struct TagAssignment {
    TagId tag_id;
    ResourceId resource_id;
    Timestamp assigned_at{};

    bool operator==(const TagAssignment&) const = default;
};

/// One entry of a story's reflection listing.
struct StoryEntry {
    std::string text;
    std::string resource_url;
    std::optional<std::string> anchored_url;

    bool operator==(const StoryEntry&) const = default;
};

struct Story {
    StoryId id;
    TagId tag_id;
    std::string title;
    std::vector<StoryEntry> reflection_listing;
    std::vector<std::string> keywords;
    std::string ai_feedback;
    Timestamp created_at{};
    std::string provider_id;

    bool operator==(const Story&) const = default;
};

enum class ActivityKind { resource_added, reflection_added, tag_created, story_created };

/// Receives the activity events emitted by store mutations.
class EventSink {
public:
    virtual ~EventSink() = default;
    virtual void on_event(ActivityKind kind, Timestamp at) = 0;
};

/// Plain data behind a CurationStore. Persisted as-is.
struct StoreState {
    std::map<ResourceId, Resource> resources;
    std::map<ReflectionId, Reflection> reflections;
    std::map<TagId, Tag> tags;
    std::vector<TagAssignment> assignments;
    std::map<StoryId, Story> stories;
    std::uint64_t next_resource{1};
    std::uint64_t next_reflection{1};
    std::uint64_t next_tag{1};
    std::uint64_t next_story{1};
    Timestamp last_stamp{};

    bool operator==(const StoreState&) const = default;
};

/// A learner's curated corpus: resources, reflections, tags and stories.
///
/// Single writer. Callers serialize mutations; const members may run
/// concurrently with each other. Every mutation takes its timestamp from
/// stamp(), which never goes backwards, so added_at and created_at values are
/// non-decreasing in insertion order even if the injected clock jumps back.
class CurationStore {
public:
    explicit CurationStore(Clock clock = system_clock(), StoreState state = {});

    void set_event_sink(EventSink* sink) noexcept { sink_ = sink; }

    /// Upsert by normalized URL; an existing resource keeps its id and gets
    /// the latest title.
    Result<Resource> add_resource(std::string_view url, std::string_view title, ResourceKind kind);
    Result<Resource> rate_resource(const ResourceId& id, int rating);
    Result<Reflection> add_reflection(const ResourceId& resource_id, std::string_view text,
                                      ReflectionKind kind = ReflectionKind::note,
                                      std::optional<std::int64_t> video_offset = std::nullopt);

    Result<Tag> create_tag(std::string_view name);
    Result<TagAssignment> assign_tag(const TagId& tag_id, const ResourceId& resource_id);

    /// Moves every assignment and story of `source` onto `target` and deletes
    /// `source`.
    Result<Tag> merge_tags(const TagId& source, const TagId& target);

    /// Ordered by added_at, then id.
    Result<std::vector<Resource>> resources_by_tag(const TagId& tag_id) const;

    /// Ordered by created_at, then id.
    std::vector<Reflection> reflections_for(const ResourceId& resource_id) const;

    /// Commits a generated story: assigns id and created_at.
    Result<Story> add_story(Story story);

    const Resource* find_resource(const ResourceId& id) const;
    const Tag* find_tag(const TagId& id) const;
    const Tag* find_tag_by_name(std::string_view name) const;
    const Story* find_story(const StoryId& id) const;
    std::optional<ResourceId> find_resource_by_url(std::string_view url) const;

    /// Ordered by added_at, then id.
    std::vector<Resource> resources() const;
    std::vector<Reflection> reflections() const;
    /// Ordered by name.
    std::vector<Tag> tags() const;
    std::vector<Story> stories() const;
    const std::vector<TagAssignment>& assignments() const noexcept { return state_.assignments; }
    std::size_t assignment_count(const TagId& tag_id) const;

    const StoreState& state() const noexcept { return state_; }

    /// Current time, clamped to never precede an earlier stamp.
    [[nodiscard]] Timestamp now() const;
    /// now(), recorded as the latest stamp.
    Timestamp stamp();

private:
    void emit(ActivityKind kind, Timestamp at);

    Clock clock_;
    StoreState state_;
    EventSink* sink_{nullptr};
    std::map<std::string, ResourceId> url_index_;
    std::map<std::string, TagId, std::less<>> name_index_;
};

/// Resource URL with a video time parameter.
Result<std::string> anchored_url(const Resource& resource, std::int64_t video_offset);

} // namespace learnstory
