#include "learnstory/activity.hpp"
#include "learnstory/curation_store.hpp"
#include "learnstory/exporter.hpp"
#include "learnstory/persistence.hpp"
#include "learnstory/story_engine.hpp"
#include "learnstory/thread.hpp"
#include "learnstory/url.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <optional>

namespace py = pybind11;
using namespace learnstory;

namespace {

struct CoreError {
    Error error;
};

template <typename T>
T unwrap(Result<T> r) {
    if (!r) {
        throw CoreError{r.error()};
    }
    return std::move(r).value();
}

void unwrap(Result<void> r) {
    if (!r) {
        throw CoreError{r.error()};
    }
}

ResourceKind resource_kind(const std::string& s) {
    auto k = parse_resource_kind(s);
    if (!k) throw py::value_error("kind must be web-page, video or other");
    return *k;
}

ReflectionKind reflection_kind(const std::string& s) {
    auto k = parse_reflection_kind(s);
    if (!k) throw py::value_error("kind must be note, question or intention");
    return *k;
}

Timestamp timestamp(const std::string& iso) {
    auto t = parse_iso8601(iso);
    if (!t) throw py::value_error("expected an ISO-8601 UTC timestamp such as 2024-05-01T12:00:00Z");
    return *t;
}

/// A store and its activity log. The clock is the system clock unless
/// pinned with set_time().
class PyStore {
public:
    PyStore() : PyStore(StoreState{}, {}) {}
    PyStore(StoreState state, std::vector<ActivityEvent> events)
        : pinned_(std::make_shared<std::optional<Timestamp>>()),
          store_(make_clock(pinned_), std::move(state)),
          log_(std::move(events)) {
        store_.set_event_sink(&log_);
    }
    PyStore(const PyStore&) = delete;
    PyStore& operator=(const PyStore&) = delete;

    void set_time(const std::optional<std::string>& iso) {
        *pinned_ = iso ? std::optional<Timestamp>(timestamp(*iso)) : std::nullopt;
    }

    CurationStore& store() { return store_; }
    ActivityLog& log() { return log_; }

private:
    static Clock make_clock(std::shared_ptr<std::optional<Timestamp>> pinned) {
        return [pinned] { return pinned->value_or(system_clock()()); };
    }

    std::shared_ptr<std::optional<Timestamp>> pinned_;
    CurationStore store_;
    ActivityLog log_;
};

py::dict layout_dict(const RepoLayout& layout) {
    py::dict files;
    for (const auto& [path, content] : layout.files) files[py::str(path)] = content;
    py::dict out;
    out["repo_name"] = layout.repo_name;
    out["files"] = files;
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "learnstory core: curation store, stories, threads, export and activity";

    static PyObject* error_type =
        PyErr_NewException("learnstory._core.LearnstoryError", PyExc_RuntimeError, nullptr);
    m.attr("LearnstoryError") = py::handle(error_type);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const CoreError& e) {
            py::object instance = py::reinterpret_borrow<py::object>(error_type)(e.error.describe());
            instance.attr("code") = std::string(code_name(e.error.code));
            instance.attr("detail") = e.error.message;
            PyErr_SetObject(error_type, instance.ptr());
        }
    });

    py::class_<Resource>(m, "Resource")
        .def_property_readonly("id", [](const Resource& r) { return r.id.value; })
        .def_readonly("url", &Resource::url)
        .def_readonly("title", &Resource::title)
        .def_property_readonly("kind", [](const Resource& r) { return std::string(to_string(r.kind)); })
        .def_property_readonly("added_at", [](const Resource& r) { return format_iso8601(r.added_at); })
        .def_readonly("rating", &Resource::rating)
        .def("__repr__", [](const Resource& r) { return "<Resource " + r.id.value + " " + r.url + ">"; });

    py::class_<Reflection>(m, "Reflection")
        .def_property_readonly("id", [](const Reflection& r) { return r.id.value; })
        .def_property_readonly("resource_id", [](const Reflection& r) { return r.resource_id.value; })
        .def_readonly("text", &Reflection::text)
        .def_property_readonly("kind", [](const Reflection& r) { return std::string(to_string(r.kind)); })
        .def_property_readonly("created_at", [](const Reflection& r) { return format_iso8601(r.created_at); })
        .def_readonly("video_offset", &Reflection::video_offset);

    py::class_<Tag>(m, "Tag")
        .def_property_readonly("id", [](const Tag& t) { return t.id.value; })
        .def_readonly("name", &Tag::name)
        .def_property_readonly("created_at", [](const Tag& t) { return format_iso8601(t.created_at); })
        .def("__repr__", [](const Tag& t) { return "<Tag " + t.id.value + " " + t.name + ">"; });

    py::class_<StoryEntry>(m, "StoryEntry")
        .def_readonly("text", &StoryEntry::text)
        .def_readonly("resource_url", &StoryEntry::resource_url)
        .def_readonly("anchored_url", &StoryEntry::anchored_url);

    py::class_<Story>(m, "Story")
        .def_property_readonly("id", [](const Story& s) { return s.id.value; })
        .def_property_readonly("tag_id", [](const Story& s) { return s.tag_id.value; })
        .def_readonly("title", &Story::title)
        .def_readonly("reflection_listing", &Story::reflection_listing)
        .def_readonly("keywords", &Story::keywords)
        .def_readonly("ai_feedback", &Story::ai_feedback)
        .def_property_readonly("created_at", [](const Story& s) { return format_iso8601(s.created_at); })
        .def_readonly("provider_id", &Story::provider_id)
        .def("text", [](const Story& s) { return serialize_story(s); }, "The story serialized with its four sections.");

    py::class_<ThreadPost>(m, "ThreadPost")
        .def_readonly("index", &ThreadPost::index)
        .def_readonly("total", &ThreadPost::total)
        .def_readonly("body", &ThreadPost::body)
        .def("__repr__", [](const ThreadPost& p) {
            return "<ThreadPost " + std::to_string(p.index) + "/" + std::to_string(p.total) + ">";
        });

    py::class_<PyStore>(m, "Store")
        .def(py::init<>())
        .def("set_time", &PyStore::set_time, py::arg("iso"),
             "Pins the store clock to an ISO-8601 UTC time; None returns to the system clock.")
        .def("add_resource",
             [](PyStore& s, const std::string& url, const std::string& title, const std::string& kind) {
                 return unwrap(s.store().add_resource(url, title, resource_kind(kind)));
             },
             py::arg("url"), py::arg("title") = "", py::arg("kind") = "web-page")
        .def("rate_resource",
             [](PyStore& s, const std::string& id, int rating) { return unwrap(s.store().rate_resource(ResourceId{id}, rating)); },
             py::arg("resource_id"), py::arg("rating"))
        .def("add_reflection",
             [](PyStore& s, const std::string& resource_id, const std::string& text, const std::string& kind,
                std::optional<std::int64_t> video_offset) {
                 return unwrap(s.store().add_reflection(ResourceId{resource_id}, text, reflection_kind(kind), video_offset));
             },
             py::arg("resource_id"), py::arg("text"), py::arg("kind") = "note", py::arg("video_offset") = py::none())
        .def("create_tag", [](PyStore& s, const std::string& name) { return unwrap(s.store().create_tag(name)); },
             py::arg("name"))
        .def("assign_tag",
             [](PyStore& s, const std::string& tag_id, const std::string& resource_id) {
                 (void)unwrap(s.store().assign_tag(TagId{tag_id}, ResourceId{resource_id}));
             },
             py::arg("tag_id"), py::arg("resource_id"))
        .def("merge_tags",
             [](PyStore& s, const std::string& source, const std::string& target) {
                 return unwrap(s.store().merge_tags(TagId{source}, TagId{target}));
             },
             py::arg("source_tag_id"), py::arg("target_tag_id"))
        .def("resources", [](PyStore& s) { return s.store().resources(); })
        .def("reflections",
             [](PyStore& s, const std::optional<std::string>& resource_id) {
                 if (!resource_id) return s.store().reflections();
                 if (s.store().find_resource(ResourceId{*resource_id}) == nullptr) {
                     throw CoreError{make_error(ErrorCode::unknown_resource, *resource_id)};
                 }
                 return s.store().reflections_for(ResourceId{*resource_id});
             },
             py::arg("resource_id") = py::none())
        .def("tags", [](PyStore& s) { return s.store().tags(); })
        .def("resources_by_tag",
             [](PyStore& s, const std::string& tag_id) { return unwrap(s.store().resources_by_tag(TagId{tag_id})); },
             py::arg("tag_id"))
        .def("generate_story",
             [](PyStore& s, const std::string& tag_id, std::size_t min_resources) {
                 auto input = unwrap(collect_story_input(s.store(), TagId{tag_id}, min_resources));
                 return unwrap(generate_and_store_story(s.store(), input, nullptr, true));
             },
             py::arg("tag_id"), py::arg("min_resources") = 1,
             "Generates a story with the offline generator and stores it.")
        .def("prompt",
             [](PyStore& s, const std::string& tag_id) {
                 auto spec = unwrap(build_prompt(unwrap(collect_story_input(s.store(), TagId{tag_id}))));
                 return py::make_tuple(spec.system_text, spec.user_text);
             },
             py::arg("tag_id"), "The (system, user) prompt a text provider would receive.")
        .def("latest_story",
             [](PyStore& s, const std::optional<std::string>& tag_id) {
                 std::optional<TagId> scope;
                 if (tag_id) scope = TagId{*tag_id};
                 return unwrap(latest_story(s.store(), scope));
             },
             py::arg("tag_id") = py::none())
        .def("adapt_story",
             [](PyStore& s, const std::string& story_id, std::size_t char_limit, const std::string& numbering_format) {
                 const Story* story = s.store().find_story(StoryId{story_id});
                 if (story == nullptr) throw CoreError{make_error(ErrorCode::unknown_story, story_id)};
                 return unwrap(adapt_for_platform(*story, PlatformProfile{"custom", char_limit, numbering_format}));
             },
             py::arg("story_id"), py::arg("char_limit") = 280, py::arg("numbering_format") = " ({i}/{n})")
        .def("export_layout",
             [](PyStore& s, const std::string& tag_id) {
                 std::optional<Story> story;
                 if (auto latest = latest_story(s.store(), TagId{tag_id})) story = *latest;
                 return layout_dict(unwrap(build_repo_layout(s.store(), TagId{tag_id}, story)));
             },
             py::arg("tag_id"), "README.md plus one markdown file per resource: {'repo_name', 'files'}.")
        .def("radar",
             [](PyStore& s) {
                 std::vector<std::pair<std::string, std::size_t>> out;
                 for (const auto& d : radar_data(s.store())) out.emplace_back(d.tag_name, d.resource_count);
                 return out;
             })
        .def("activity_snapshot",
             [](PyStore& s) {
                 const auto snap = s.log().compute_snapshot(s.store().now());
                 py::dict out;
                 for (auto kind : kActivityKinds) {
                     const auto& slot = snap.of(kind);
                     out[py::str(std::string(to_string(kind)))] =
                         slot ? py::object(py::int_(slot->elapsed.count())) : py::object(py::none());
                 }
                 return out;
             },
             "Seconds since the latest event of each kind, None when there is none.")
        .def("save",
             [](PyStore& s, const std::string& path) {
                 DataFile data{{LearnerData{"default", "", s.store().state(), s.log().events()}}};
                 unwrap(persist_store(data, path));
             },
             py::arg("path"))
        .def_static(
            "load",
            [](const std::string& path) {
                auto data = unwrap(load_store(path));
                if (data.learners.empty()) return std::make_unique<PyStore>();
                auto& l = data.learners.front();
                return std::make_unique<PyStore>(std::move(l.store), std::move(l.events));
            },
            py::arg("path"));

    m.def("extract_keywords", [](const std::vector<std::string>& texts, std::size_t k) { return extract_keywords(texts, k); },
          py::arg("texts"), py::arg("k"));
    m.def("split_into_thread",
          [](const std::string& text, std::size_t char_limit, const std::string& numbering_format) {
              return unwrap(split_into_thread(text, PlatformProfile{"custom", char_limit, numbering_format}));
          },
          py::arg("text"), py::arg("char_limit") = 280, py::arg("numbering_format") = " ({i}/{n})");
    m.def("normalize_url", [](const std::string& url) { return unwrap(normalize_url(url)); }, py::arg("url"));
}
