#include "json_codec.hpp"

namespace learnstory::codec {

namespace {

json iso(Timestamp t) { return format_iso8601(t); }

} // namespace

json encode(const Resource& r) {
    json j{{"id", r.id.value},           {"url", r.url},
           {"title", r.title},           {"kind", to_string(r.kind)},
           {"added_at", iso(r.added_at)}, {"rating", nullptr}};
    if (r.rating) {
        j["rating"] = *r.rating;
    }
    return j;
}

json encode(const Reflection& r) {
    json j{{"id", r.id.value},
           {"resource_id", r.resource_id.value},
           {"text", r.text},
           {"kind", to_string(r.kind)},
           {"created_at", iso(r.created_at)},
           {"video_offset", nullptr}};
    if (r.video_offset) {
        j["video_offset"] = *r.video_offset;
    }
    return j;
}

json encode(const Tag& t) { return json{{"id", t.id.value}, {"name", t.name}, {"created_at", iso(t.created_at)}}; }

json encode(const TagAssignment& a) {
    return json{{"tag_id", a.tag_id.value}, {"resource_id", a.resource_id.value}, {"assigned_at", iso(a.assigned_at)}};
}

json encode(const StoryEntry& e) {
    json j{{"text", e.text}, {"resource_url", e.resource_url}, {"anchored_url", nullptr}};
    if (e.anchored_url) {
        j["anchored_url"] = *e.anchored_url;
    }
    return j;
}

json encode(const Story& s) {
    json listing = json::array();
    for (const auto& e : s.reflection_listing) {
        listing.push_back(encode(e));
    }
    return json{{"id", s.id.value},
                {"tag_id", s.tag_id.value},
                {"title", s.title},
                {"reflection_listing", std::move(listing)},
                {"keywords", s.keywords},
                {"ai_feedback", s.ai_feedback},
                {"created_at", iso(s.created_at)},
                {"provider_id", s.provider_id}};
}

json encode(const ActivityEvent& e) { return json{{"kind", to_string(e.kind)}, {"at", iso(e.at)}}; }

json encode(const ActivitySnapshot& s) {
    json kinds = json::object();
    for (auto kind : kActivityKinds) {
        const auto& slot = s.of(kind);
        if (slot) {
            kinds[std::string(to_string(kind))] =
                json{{"last_at", iso(slot->last_at)}, {"elapsed_seconds", slot->elapsed.count()}};
        } else {
            kinds[std::string(to_string(kind))] = nullptr;
        }
    }
    return json{{"computed_at", iso(s.computed_at)}, {"kinds", std::move(kinds)}};
}

json encode(const RadarDatum& d) { return json{{"tag_name", d.tag_name}, {"resource_count", d.resource_count}}; }

json encode(const ThreadPost& p) { return json{{"index", p.index}, {"total", p.total}, {"body", p.body}}; }

json encode(const RepoLayout& l) {
    json files = json::array();
    for (const auto& [path, content] : l.files) {
        files.push_back(json{{"path", path}, {"content", content}});
    }
    return json{{"repo_name", l.repo_name}, {"files", std::move(files)}};
}

json encode(const RemotePushReceipt& r) {
    return json{{"remote_url", r.remote_url}, {"files_written", r.files_written}, {"pushed_at", iso(r.pushed_at)}};
}

json encode(const StoryRef& r) { return json{{"id", r.id.value}, {"tag_id", r.tag_id.value}, {"title", r.title}}; }

json encode(const NudgePayload& p) {
    return json{{"snapshot", encode(p.snapshot)}, {"latest_story", p.latest_story ? encode(*p.latest_story) : json(nullptr)}};
}

void Reader::fail(const std::string& what) const { throw DecodeError(where_.empty() ? "/" : where_, what); }

bool Reader::has(const std::string& key) const { return value_.is_object() && value_.contains(key); }

Reader Reader::field(const std::string& key) const {
    if (!value_.is_object()) {
        fail("expected an object");
    }
    auto it = value_.find(key);
    if (it == value_.end()) {
        throw DecodeError(where_ + "/" + key, "missing field");
    }
    return Reader(*it, where_ + "/" + key);
}

Reader Reader::at(std::size_t index) const {
    if (!value_.is_array() || index >= value_.size()) {
        fail("expected an array element " + std::to_string(index));
    }
    return Reader(value_[index], where_ + "/" + std::to_string(index));
}

std::size_t Reader::size() const {
    if (!value_.is_array()) {
        fail("expected an array");
    }
    return value_.size();
}

std::string Reader::string() const {
    if (!value_.is_string()) {
        fail("expected a string");
    }
    return value_.get<std::string>();
}

std::int64_t Reader::integer() const {
    if (!value_.is_number_integer()) {
        fail("expected an integer");
    }
    return value_.get<std::int64_t>();
}

bool Reader::boolean() const {
    if (!value_.is_boolean()) {
        fail("expected a boolean");
    }
    return value_.get<bool>();
}

Timestamp Reader::timestamp() const {
    auto t = parse_iso8601(string());
    if (!t) {
        fail("expected an ISO-8601 UTC timestamp");
    }
    return *t;
}

Resource decode_resource(const Reader& r) {
    Resource out;
    out.id = ResourceId{r.field("id").string()};
    out.url = r.field("url").string();
    out.title = r.field("title").string();
    auto kind = parse_resource_kind(r.field("kind").string());
    if (!kind) {
        r.field("kind").fail("unknown resource kind");
    }
    out.kind = *kind;
    out.added_at = r.field("added_at").timestamp();
    if (r.has("rating") && !r.raw()["rating"].is_null()) {
        const auto v = r.field("rating").integer();
        if (v < 1 || v > 5) {
            r.field("rating").fail("rating out of range");
        }
        out.rating = static_cast<int>(v);
    }
    return out;
}

Reflection decode_reflection(const Reader& r) {
    Reflection out;
    out.id = ReflectionId{r.field("id").string()};
    out.resource_id = ResourceId{r.field("resource_id").string()};
    out.text = r.field("text").string();
    auto kind = parse_reflection_kind(r.field("kind").string());
    if (!kind) {
        r.field("kind").fail("unknown reflection kind");
    }
    out.kind = *kind;
    out.created_at = r.field("created_at").timestamp();
    if (r.has("video_offset") && !r.raw()["video_offset"].is_null()) {
        out.video_offset = r.field("video_offset").integer();
    }
    return out;
}

Tag decode_tag(const Reader& r) {
    return Tag{TagId{r.field("id").string()}, r.field("name").string(), r.field("created_at").timestamp()};
}

TagAssignment decode_assignment(const Reader& r) {
    return TagAssignment{TagId{r.field("tag_id").string()}, ResourceId{r.field("resource_id").string()},
                         r.field("assigned_at").timestamp()};
}

Story decode_story(const Reader& r) {
    Story out;
    out.id = StoryId{r.field("id").string()};
    out.tag_id = TagId{r.field("tag_id").string()};
    out.title = r.field("title").string();
    const auto listing = r.field("reflection_listing");
    for (std::size_t i = 0; i < listing.size(); ++i) {
        const auto e = listing.at(i);
        StoryEntry entry{e.field("text").string(), e.field("resource_url").string(), std::nullopt};
        if (e.has("anchored_url") && !e.raw()["anchored_url"].is_null()) {
            entry.anchored_url = e.field("anchored_url").string();
        }
        out.reflection_listing.push_back(std::move(entry));
    }
    const auto keywords = r.field("keywords");
    for (std::size_t i = 0; i < keywords.size(); ++i) {
        out.keywords.push_back(keywords.at(i).string());
    }
    out.ai_feedback = r.field("ai_feedback").string();
    out.created_at = r.field("created_at").timestamp();
    out.provider_id = r.field("provider_id").string();
    return out;
}

ActivityEvent decode_event(const Reader& r) {
    auto kind = parse_activity_kind(r.field("kind").string());
    if (!kind) {
        r.field("kind").fail("unknown activity kind");
    }
    return ActivityEvent{*kind, r.field("at").timestamp()};
}

PlatformProfile decode_profile(const Reader& r) {
    PlatformProfile p;
    p.name = r.field("name").string();
    const auto limit = r.field("char_limit").integer();
    if (limit <= 0) {
        r.field("char_limit").fail("must be positive");
    }
    p.char_limit = static_cast<std::size_t>(limit);
    if (r.has("numbering_format")) {
        p.numbering_format = r.field("numbering_format").string();
    }
    return p;
}

} // namespace learnstory::codec
