#pragma once

// JSON encoding shared by the data file and the HTTP surface.

#include "learnstory/activity.hpp"
#include "learnstory/curation_store.hpp"
#include "learnstory/exporter.hpp"
#include "learnstory/story_engine.hpp"
#include "learnstory/thread.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>

namespace learnstory::codec {

using json = nlohmann::json;

json encode(const Resource& r);
json encode(const Reflection& r);
json encode(const Tag& t);
json encode(const TagAssignment& a);
json encode(const StoryEntry& e);
json encode(const Story& s);
json encode(const ActivityEvent& e);
json encode(const ActivitySnapshot& s);
json encode(const RadarDatum& d);
json encode(const ThreadPost& p);
json encode(const RepoLayout& l);
json encode(const RemotePushReceipt& r);
json encode(const NudgePayload& p);
json encode(const StoryRef& r);

/// Thrown by the decoders; `where` is a JSON pointer to the offending value.
struct DecodeError : std::runtime_error {
    DecodeError(std::string where_, const std::string& what) : std::runtime_error(what), where(std::move(where_)) {}
    std::string where;
};

/// Typed field access that reports failures with their JSON pointer.
class Reader {
public:
    Reader(const json& value, std::string where) : value_(value), where_(std::move(where)) {}

    [[nodiscard]] const json& raw() const noexcept { return value_; }
    [[nodiscard]] const std::string& where() const noexcept { return where_; }

    Reader field(const std::string& key) const;
    [[nodiscard]] bool has(const std::string& key) const;
    Reader at(std::size_t index) const;
    [[nodiscard]] std::size_t size() const;  // arrays only

    [[nodiscard]] std::string string() const;
    [[nodiscard]] std::int64_t integer() const;
    [[nodiscard]] bool boolean() const;
    [[nodiscard]] Timestamp timestamp() const;

    [[noreturn]] void fail(const std::string& what) const;

private:
    const json& value_;
    std::string where_;
};

Resource decode_resource(const Reader& r);
Reflection decode_reflection(const Reader& r);
Tag decode_tag(const Reader& r);
TagAssignment decode_assignment(const Reader& r);
Story decode_story(const Reader& r);
ActivityEvent decode_event(const Reader& r);
PlatformProfile decode_profile(const Reader& r);

} // namespace learnstory::codec
