#include "learnstory/persistence.hpp"

#include "json_codec.hpp"

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fcntl.h>
#include <fstream>
#include <set>
#include <sstream>
#include <unistd.h>

namespace learnstory {

using codec::json;
using codec::Reader;

namespace {

constexpr std::string_view kFormatName = "learnstory-data";

json encode_store(const StoreState& s) {
    json resources = json::array();
    for (const auto& [id, r] : s.resources) resources.push_back(codec::encode(r));
    json reflections = json::array();
    for (const auto& [id, r] : s.reflections) reflections.push_back(codec::encode(r));
    json tags = json::array();
    for (const auto& [id, t] : s.tags) tags.push_back(codec::encode(t));
    json assignments = json::array();
    for (const auto& a : s.assignments) assignments.push_back(codec::encode(a));
    json stories = json::array();
    for (const auto& [id, st] : s.stories) stories.push_back(codec::encode(st));
    return json{{"resources", std::move(resources)},
                {"reflections", std::move(reflections)},
                {"tags", std::move(tags)},
                {"assignments", std::move(assignments)},
                {"stories", std::move(stories)},
                {"counters",
                 {{"resource", s.next_resource},
                  {"reflection", s.next_reflection},
                  {"tag", s.next_tag},
                  {"story", s.next_story}}},
                {"last_stamp", format_iso8601(s.last_stamp)}};
}

std::uint64_t counter(const Reader& r) {
    const auto v = r.integer();
    if (v < 1) {
        r.fail("counter must be positive");
    }
    return static_cast<std::uint64_t>(v);
}

StoreState decode_store(const Reader& r) {
    StoreState s;
    const auto resources = r.field("resources");
    for (std::size_t i = 0; i < resources.size(); ++i) {
        auto res = codec::decode_resource(resources.at(i));
        if (!s.resources.emplace(res.id, res).second) {
            resources.at(i).fail("duplicate resource id " + res.id.value);
        }
    }
    const auto reflections = r.field("reflections");
    for (std::size_t i = 0; i < reflections.size(); ++i) {
        auto refl = codec::decode_reflection(reflections.at(i));
        auto res = s.resources.find(refl.resource_id);
        if (res == s.resources.end()) {
            reflections.at(i).fail("reflection references unknown resource " + refl.resource_id.value);
        }
        if (refl.video_offset && res->second.kind != ResourceKind::video) {
            reflections.at(i).fail("video offset on a non-video resource");
        }
        if (!s.reflections.emplace(refl.id, refl).second) {
            reflections.at(i).fail("duplicate reflection id " + refl.id.value);
        }
    }
    std::set<std::string> names;
    const auto tags = r.field("tags");
    for (std::size_t i = 0; i < tags.size(); ++i) {
        auto tag = codec::decode_tag(tags.at(i));
        if (!names.insert(tag.name).second || !s.tags.emplace(tag.id, tag).second) {
            tags.at(i).fail("duplicate tag " + tag.name);
        }
    }
    std::set<std::pair<TagId, ResourceId>> pairs;
    const auto assignments = r.field("assignments");
    for (std::size_t i = 0; i < assignments.size(); ++i) {
        auto a = codec::decode_assignment(assignments.at(i));
        if (!s.tags.contains(a.tag_id) || !s.resources.contains(a.resource_id)) {
            assignments.at(i).fail("assignment references unknown tag or resource");
        }
        if (!pairs.emplace(a.tag_id, a.resource_id).second) {
            assignments.at(i).fail("duplicate assignment");
        }
        s.assignments.push_back(a);
    }
    const auto stories = r.field("stories");
    for (std::size_t i = 0; i < stories.size(); ++i) {
        auto story = codec::decode_story(stories.at(i));
        if (!s.tags.contains(story.tag_id)) {
            stories.at(i).fail("story references unknown tag " + story.tag_id.value);
        }
        s.stories.emplace(story.id, story);
    }
    const auto counters = r.field("counters");
    s.next_resource = counter(counters.field("resource"));
    s.next_reflection = counter(counters.field("reflection"));
    s.next_tag = counter(counters.field("tag"));
    s.next_story = counter(counters.field("story"));
    s.last_stamp = r.field("last_stamp").timestamp();
    return s;
}

Error io_error(const std::string& what, const std::filesystem::path& path) {
    return make_error(ErrorCode::io_failure, what + " " + path.string() + ": " + std::strerror(errno));
}

} // namespace

std::string encode_data_file(const DataFile& data) {
    json learners = json::array();
    for (const auto& l : data.learners) {
        json events = json::array();
        for (const auto& e : l.events) events.push_back(codec::encode(e));
        learners.push_back(json{{"learner_id", l.learner_id},
                                {"token_digest", l.token_digest},
                                {"store", encode_store(l.store)},
                                {"events", std::move(events)}});
    }
    json root{{"format", kFormatName}, {"version", kDataFileVersion}, {"learners", std::move(learners)}};
    return root.dump(2) + "\n";
}

Result<DataFile> decode_data_file(std::string_view text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        return make_error(ErrorCode::corrupt_store, "syntax error at byte " + std::to_string(e.byte));
    }
    try {
        const Reader r(root, "");
        if (r.field("format").string() != kFormatName) {
            r.field("format").fail("not a learnstory data file");
        }
        if (r.field("version").integer() != kDataFileVersion) {
            r.field("version").fail("unsupported version");
        }
        DataFile data;
        std::set<std::string> ids;
        const auto learners = r.field("learners");
        for (std::size_t i = 0; i < learners.size(); ++i) {
            const auto l = learners.at(i);
            LearnerData d;
            d.learner_id = l.field("learner_id").string();
            if (d.learner_id.empty() || !ids.insert(d.learner_id).second) {
                l.field("learner_id").fail("empty or duplicate learner id");
            }
            d.token_digest = l.field("token_digest").string();
            d.store = decode_store(l.field("store"));
            const auto events = l.field("events");
            for (std::size_t k = 0; k < events.size(); ++k) {
                d.events.push_back(codec::decode_event(events.at(k)));
            }
            data.learners.push_back(std::move(d));
        }
        return data;
    } catch (const codec::DecodeError& e) {
        return make_error(ErrorCode::corrupt_store, "at " + e.where + ": " + e.what());
    }
}

Result<DataFile> load_store(const std::filesystem::path& path) {
    std::error_code ec;
    if (!std::filesystem::exists(path, ec)) {
        if (ec) {
            return make_error(ErrorCode::io_failure, "cannot stat " + path.string() + ": " + ec.message());
        }
        return DataFile{};
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        return io_error("cannot open", path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) {
        return io_error("cannot read", path);
    }
    auto data = decode_data_file(buf.str());
    if (!data) {
        return make_error(ErrorCode::corrupt_store, path.string() + " " + data.error().message);
    }
    return data;
}

Result<void> persist_store(const DataFile& data, const std::filesystem::path& path, const PersistHooks& hooks) {
    const std::string bytes = encode_data_file(data);
    std::filesystem::path temp = path;
    temp += ".tmp";

    const int fd = ::open(temp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0600);
    if (fd < 0) {
        return io_error("cannot create", temp);
    }
    std::size_t written = 0;
    while (written < bytes.size()) {
        const auto n = ::write(fd, bytes.data() + written, bytes.size() - written);
        if (n < 0) {
            if (errno == EINTR) continue;
            auto err = io_error("cannot write", temp);
            ::close(fd);
            return err;
        }
        written += static_cast<std::size_t>(n);
    }
    if (::fsync(fd) != 0) {
        auto err = io_error("cannot sync", temp);
        ::close(fd);
        return err;
    }
    ::close(fd);

    if (hooks.before_rename) {
        hooks.before_rename(temp);
    }
    if (std::rename(temp.c_str(), path.c_str()) != 0) {
        return io_error("cannot replace", path);
    }
    // Make the rename itself durable.
    auto dir = path.parent_path();
    if (dir.empty()) {
        dir = ".";
    }
    if (const int dfd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY | O_CLOEXEC); dfd >= 0) {
        ::fsync(dfd);
        ::close(dfd);
    }
    return {};
}

} // namespace learnstory
