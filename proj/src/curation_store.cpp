#include "learnstory/curation_store.hpp"

#include "learnstory/text.hpp"
#include "learnstory/url.hpp"

#include <algorithm>
#include <set>

namespace learnstory {

std::string_view to_string(ResourceKind kind) noexcept {
    switch (kind) {
        case ResourceKind::web_page: return "web-page";
        case ResourceKind::video: return "video";
        case ResourceKind::other: return "other";
    }
    return "other";
}

std::string_view to_string(ReflectionKind kind) noexcept {
    switch (kind) {
        case ReflectionKind::note: return "note";
        case ReflectionKind::question: return "question";
        case ReflectionKind::intention: return "intention";
    }
    return "note";
}

std::optional<ResourceKind> parse_resource_kind(std::string_view s) noexcept {
    if (s == "web-page") return ResourceKind::web_page;
    if (s == "video") return ResourceKind::video;
    if (s == "other") return ResourceKind::other;
    return std::nullopt;
}

std::optional<ReflectionKind> parse_reflection_kind(std::string_view s) noexcept {
    if (s == "note") return ReflectionKind::note;
    if (s == "question") return ReflectionKind::question;
    if (s == "intention") return ReflectionKind::intention;
    return std::nullopt;
}

namespace {

// CRLF and lone CR become LF; outer whitespace is dropped.
std::string clean_reflection_text(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (raw[i] == '\r') {
            out += '\n';
            if (i + 1 < raw.size() && raw[i + 1] == '\n') {
                ++i;
            }
        } else {
            out += raw[i];
        }
    }
    return std::string(text::trim(out));
}

bool by_added(const Resource& a, const Resource& b) {
    return std::tie(a.added_at, a.id) < std::tie(b.added_at, b.id);
}

} // namespace

CurationStore::CurationStore(Clock clock, StoreState state) : clock_(std::move(clock)), state_(std::move(state)) {
    for (const auto& [id, r] : state_.resources) {
        if (auto key = normalize_url(r.url)) {
            url_index_.emplace(*key, id);
        }
    }
    for (const auto& [id, t] : state_.tags) {
        name_index_.emplace(t.name, id);
    }
}

Timestamp CurationStore::now() const { return std::max(clock_(), state_.last_stamp); }

Timestamp CurationStore::stamp() {
    state_.last_stamp = now();
    return state_.last_stamp;
}

void CurationStore::emit(ActivityKind kind, Timestamp at) {
    if (sink_ != nullptr) {
        sink_->on_event(kind, at);
    }
}

Result<Resource> CurationStore::add_resource(std::string_view url, std::string_view title, ResourceKind kind) {
    const std::string trimmed(text::trim(url));
    auto key = normalize_url(trimmed);
    if (!key) {
        return key.error();
    }
    if (auto it = url_index_.find(*key); it != url_index_.end()) {
        Resource& existing = state_.resources.at(it->second);
        existing.title = text::collapse_whitespace(title);
        return existing;
    }
    Resource r;
    r.id = ResourceId{format_sequential_id("res", state_.next_resource++)};
    r.url = trimmed;
    r.title = text::collapse_whitespace(title);
    r.kind = kind;
    r.added_at = stamp();
    url_index_.emplace(*key, r.id);
    state_.resources.emplace(r.id, r);
    emit(ActivityKind::resource_added, r.added_at);
    return r;
}

Result<Resource> CurationStore::rate_resource(const ResourceId& id, int rating) {
    auto it = state_.resources.find(id);
    if (it == state_.resources.end()) {
        return make_error(ErrorCode::unknown_resource, id.value);
    }
    if (rating < 1 || rating > 5) {
        return make_error(ErrorCode::rating_out_of_range, "rating must be in [1,5], got " + std::to_string(rating));
    }
    it->second.rating = rating;
    return it->second;
}

Result<Reflection> CurationStore::add_reflection(const ResourceId& resource_id, std::string_view raw_text,
                                                 ReflectionKind kind, std::optional<std::int64_t> video_offset) {
    auto it = state_.resources.find(resource_id);
    if (it == state_.resources.end()) {
        return make_error(ErrorCode::unknown_resource, resource_id.value);
    }
    std::string body = clean_reflection_text(raw_text);
    if (body.empty()) {
        return make_error(ErrorCode::empty_text, "reflection text is empty");
    }
    if (video_offset) {
        if (it->second.kind != ResourceKind::video) {
            return make_error(ErrorCode::offset_on_non_video, "resource " + resource_id.value + " is not a video");
        }
        if (*video_offset < 0) {
            return make_error(ErrorCode::invalid_offset, "video offset must be non-negative");
        }
    }
    Reflection r;
    r.id = ReflectionId{format_sequential_id("ref", state_.next_reflection++)};
    r.resource_id = resource_id;
    r.text = std::move(body);
    r.kind = kind;
    r.created_at = stamp();
    r.video_offset = video_offset;
    state_.reflections.emplace(r.id, r);
    emit(ActivityKind::reflection_added, r.created_at);
    return r;
}

Result<Tag> CurationStore::create_tag(std::string_view name) {
    std::string normalized = text::normalize_tag_name(name);
    if (normalized.empty()) {
        return make_error(ErrorCode::empty_name, "tag name is empty");
    }
    if (auto it = name_index_.find(normalized); it != name_index_.end()) {
        return state_.tags.at(it->second);
    }
    Tag t;
    t.id = TagId{format_sequential_id("tag", state_.next_tag++)};
    t.name = std::move(normalized);
    t.created_at = stamp();
    name_index_.emplace(t.name, t.id);
    state_.tags.emplace(t.id, t);
    emit(ActivityKind::tag_created, t.created_at);
    return t;
}

Result<TagAssignment> CurationStore::assign_tag(const TagId& tag_id, const ResourceId& resource_id) {
    if (!state_.tags.contains(tag_id)) {
        return make_error(ErrorCode::unknown_tag, tag_id.value);
    }
    if (!state_.resources.contains(resource_id)) {
        return make_error(ErrorCode::unknown_resource, resource_id.value);
    }
    for (const auto& a : state_.assignments) {
        if (a.tag_id == tag_id && a.resource_id == resource_id) {
            return a;
        }
    }
    TagAssignment a{tag_id, resource_id, stamp()};
    state_.assignments.push_back(a);
    return a;
}

Result<Tag> CurationStore::merge_tags(const TagId& source, const TagId& target) {
    if (!state_.tags.contains(source)) {
        return make_error(ErrorCode::unknown_tag, source.value);
    }
    if (!state_.tags.contains(target)) {
        return make_error(ErrorCode::unknown_tag, target.value);
    }
    if (source == target) {
        return make_error(ErrorCode::self_merge, "cannot merge a tag into itself");
    }
    std::set<ResourceId> in_target;
    for (const auto& a : state_.assignments) {
        if (a.tag_id == target) {
            in_target.insert(a.resource_id);
        }
    }
    std::vector<TagAssignment> kept;
    kept.reserve(state_.assignments.size());
    for (auto& a : state_.assignments) {
        if (a.tag_id != source) {
            kept.push_back(a);
        } else if (in_target.insert(a.resource_id).second) {
            kept.push_back(TagAssignment{target, a.resource_id, a.assigned_at});
        }
    }
    state_.assignments = std::move(kept);
    for (auto& [id, story] : state_.stories) {
        if (story.tag_id == source) {
            story.tag_id = target;
        }
    }
    name_index_.erase(state_.tags.at(source).name);
    state_.tags.erase(source);
    return state_.tags.at(target);
}

Result<std::vector<Resource>> CurationStore::resources_by_tag(const TagId& tag_id) const {
    if (!state_.tags.contains(tag_id)) {
        return make_error(ErrorCode::unknown_tag, tag_id.value);
    }
    std::vector<Resource> out;
    for (const auto& a : state_.assignments) {
        if (a.tag_id == tag_id) {
            out.push_back(state_.resources.at(a.resource_id));
        }
    }
    std::sort(out.begin(), out.end(), by_added);
    return out;
}

std::vector<Reflection> CurationStore::reflections_for(const ResourceId& resource_id) const {
    std::vector<Reflection> out;
    for (const auto& [id, r] : state_.reflections) {
        if (r.resource_id == resource_id) {
            out.push_back(r);
        }
    }
    std::sort(out.begin(), out.end(), [](const Reflection& a, const Reflection& b) {
        return std::tie(a.created_at, a.id) < std::tie(b.created_at, b.id);
    });
    return out;
}

Result<Story> CurationStore::add_story(Story story) {
    if (!state_.tags.contains(story.tag_id)) {
        return make_error(ErrorCode::unknown_tag, story.tag_id.value);
    }
    story.id = StoryId{format_sequential_id("story", state_.next_story++)};
    story.created_at = stamp();
    state_.stories.emplace(story.id, story);
    emit(ActivityKind::story_created, story.created_at);
    return story;
}

const Resource* CurationStore::find_resource(const ResourceId& id) const {
    auto it = state_.resources.find(id);
    return it == state_.resources.end() ? nullptr : &it->second;
}

const Tag* CurationStore::find_tag(const TagId& id) const {
    auto it = state_.tags.find(id);
    return it == state_.tags.end() ? nullptr : &it->second;
}

const Tag* CurationStore::find_tag_by_name(std::string_view name) const {
    auto it = name_index_.find(text::normalize_tag_name(name));
    return it == name_index_.end() ? nullptr : find_tag(it->second);
}

const Story* CurationStore::find_story(const StoryId& id) const {
    auto it = state_.stories.find(id);
    return it == state_.stories.end() ? nullptr : &it->second;
}

std::optional<ResourceId> CurationStore::find_resource_by_url(std::string_view url) const {
    auto key = normalize_url(text::trim(url));
    if (!key) {
        return std::nullopt;
    }
    auto it = url_index_.find(*key);
    if (it == url_index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::vector<Resource> CurationStore::resources() const {
    std::vector<Resource> out;
    out.reserve(state_.resources.size());
    for (const auto& [id, r] : state_.resources) {
        out.push_back(r);
    }
    std::sort(out.begin(), out.end(), by_added);
    return out;
}

std::vector<Reflection> CurationStore::reflections() const {
    std::vector<Reflection> out;
    for (const auto& [id, r] : state_.reflections) {
        out.push_back(r);
    }
    return out;
}

std::vector<Tag> CurationStore::tags() const {
    std::vector<Tag> out;
    for (const auto& [name, id] : name_index_) {
        out.push_back(state_.tags.at(id));
    }
    return out;
}

std::vector<Story> CurationStore::stories() const {
    std::vector<Story> out;
    for (const auto& [id, s] : state_.stories) {
        out.push_back(s);
    }
    return out;
}

std::size_t CurationStore::assignment_count(const TagId& tag_id) const {
    return static_cast<std::size_t>(std::count_if(state_.assignments.begin(), state_.assignments.end(),
                                                  [&](const TagAssignment& a) { return a.tag_id == tag_id; }));
}

Result<std::string> anchored_url(const Resource& resource, std::int64_t video_offset) {
    if (resource.kind != ResourceKind::video) {
        return make_error(ErrorCode::not_a_video, resource.id.value);
    }
    if (video_offset < 0) {
        return make_error(ErrorCode::invalid_offset, "video offset must be non-negative");
    }
    return append_time_parameter(resource.url, video_offset);
}

} // namespace learnstory
