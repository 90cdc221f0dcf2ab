#include "learnstory/service.hpp"

#include "json_codec.hpp"
#include "learnstory/text.hpp"

#include <openssl/evp.h>
#include <openssl/rand.h>

#include <algorithm>
#include <cstdio>
#include <limits>
#include <iostream>

namespace learnstory {

using codec::json;

namespace {

int status_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::unknown_resource:
        case ErrorCode::unknown_reflection:
        case ErrorCode::unknown_tag:
        case ErrorCode::unknown_story:
        case ErrorCode::unknown_job:
        case ErrorCode::no_story:
        case ErrorCode::not_found: return 404;
        case ErrorCode::unauthorized: return 401;
        case ErrorCode::method_not_allowed: return 405;
        case ErrorCode::provider_failure:
        case ErrorCode::remote_failure: return 502;
        case ErrorCode::io_failure:
        case ErrorCode::corrupt_store:
        case ErrorCode::internal: return 500;
        default: return 400;
    }
}

Response error_response(const Error& e) {
    return Response{status_for(e.code), json{{"error", {{"code", code_name(e.code)}, {"message", e.message}}}}.dump()};
}

Response ok(int status, const json& body) { return Response{status, body.dump()}; }

/// Request body as a JSON object; invalid-request otherwise.
Result<json> body_object(const Request& request) {
    if (text::trim(request.body).empty()) {
        return json::object();
    }
    try {
        auto j = json::parse(request.body);
        if (!j.is_object()) {
            return make_error(ErrorCode::invalid_request, "body must be a JSON object");
        }
        return j;
    } catch (const json::parse_error& e) {
        return make_error(ErrorCode::invalid_request, std::string("malformed JSON body: ") + e.what());
    }
}

Result<std::string> required_string(const json& body, const char* key) {
    auto it = body.find(key);
    if (it == body.end() || !it->is_string()) {
        return make_error(ErrorCode::invalid_request, std::string("field \"") + key + "\" must be a string");
    }
    return it->get<std::string>();
}

std::optional<std::string> query_param(const Request& request, const std::string& key) {
    auto it = request.query.find(key);
    if (it == request.query.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::vector<std::string> split_path(std::string_view path) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < path.size()) {
        if (path[i] == '/') {
            ++i;
            continue;
        }
        auto j = path.find('/', i);
        if (j == std::string_view::npos) j = path.size();
        out.emplace_back(path.substr(i, j - i));
        i = j;
    }
    return out;
}

json story_json(const Story& s) {
    json j = codec::encode(s);
    j["text"] = serialize_story(s);
    return j;
}

json reflection_json(const CurationStore& store, const Reflection& r) {
    json j = codec::encode(r);
    j["anchored_url"] = nullptr;
    if (r.video_offset) {
        if (const Resource* res = store.find_resource(r.resource_id)) {
            if (auto a = anchored_url(*res, *r.video_offset)) {
                j["anchored_url"] = *a;
            }
        }
    }
    return j;
}

// Which methods each path shape accepts; empty means unknown path.
std::vector<std::string> allowed_methods(const std::vector<std::string>& seg) {
    const auto n = seg.size();
    if (n == 1 && seg[0] == "healthz") return {"GET"};
    if (n == 1 && (seg[0] == "resources" || seg[0] == "reflections" || seg[0] == "tags")) return {"GET", "POST"};
    if (n == 3 && seg[0] == "resources" && seg[2] == "rating") return {"POST"};
    if (n == 2 && seg[0] == "tags" && seg[1] == "merge") return {"POST"};
    if (n == 3 && seg[0] == "tags" && seg[2] == "assign") return {"POST"};
    if (n == 3 && seg[0] == "tags" && seg[2] == "resources") return {"GET"};
    if (n == 1 && seg[0] == "stories") return {"POST"};
    if (n == 2 && seg[0] == "stories" && seg[1] == "latest") return {"GET"};
    if (n == 3 && seg[0] == "stories" && seg[1] == "jobs") return {"GET"};
    if (n == 3 && seg[0] == "stories" && seg[2] == "adapt") return {"POST"};
    if (n == 2 && seg[0] == "export") return {"POST"};
    if (n == 2 && seg[0] == "activity" && (seg[1] == "snapshot" || seg[1] == "radar")) return {"GET"};
    if (n == 2 && seg[0] == "nudge" && seg[1] == "evaluate") return {"POST"};
    return {};
}

} // namespace

std::string token_digest(std::string_view token) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(token.data(), token.size(), digest, &len, EVP_sha256(), nullptr);
    std::string hex;
    char buf[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(buf, sizeof buf, "%02x", digest[i]);
        hex += buf;
    }
    return hex;
}

std::string generate_token() {
    unsigned char bytes[24];
    if (RAND_bytes(bytes, sizeof bytes) != 1) {
        throw std::runtime_error("no entropy for learner token");
    }
    std::string out;
    char buf[3];
    for (unsigned char b : bytes) {
        std::snprintf(buf, sizeof buf, "%02x", b);
        out += buf;
    }
    return out;
}

Workspace::Workspace(Clock clock, StoreState state, std::vector<ActivityEvent> events)
    : store(clock, std::move(state)), activity(std::move(events)), clock_(std::move(clock)) {
    store.set_event_sink(&activity);
}

void Workspace::restore(StoreState state, std::vector<ActivityEvent> events) {
    store = CurationStore(clock_, std::move(state));
    activity = ActivityLog(std::move(events));
    store.set_event_sink(&activity);
}

Service::Service(ServiceConfig config, DataFile data, std::unique_ptr<TextProvider> provider,
                 std::unique_ptr<RepoHostClient> repo_host, Clock clock)
    : config_(std::move(config)), provider_(std::move(provider)), repo_host_(std::move(repo_host)),
      clock_(std::move(clock)) {
    for (auto& l : data.learners) {
        auto learner = std::make_unique<Learner>();
        learner->id = l.learner_id;
        learner->token_digest = l.token_digest;
        learner->workspace = std::make_unique<Workspace>(clock_, std::move(l.store), std::move(l.events));
        learners_.emplace(learner->id, std::move(learner));
    }
}

Service::~Service() { drain_jobs(); }

void Service::drain_jobs() {
    std::vector<std::thread> workers;
    {
        std::lock_guard lock(jobs_mutex_);
        workers.swap(workers_);
    }
    for (auto& t : workers) {
        t.join();
    }
}

Result<void> Service::set_learner_token(const std::string& learner_id, std::string_view token) {
    if (learner_id.empty() || token.empty()) {
        return make_error(ErrorCode::invalid_request, "learner id and token must be non-empty");
    }
    std::unique_lock lock(state_mutex_);
    auto& slot = learners_[learner_id];
    if (!slot) {
        slot = std::make_unique<Learner>();
        slot->id = learner_id;
        slot->workspace = std::make_unique<Workspace>(clock_, StoreState{}, std::vector<ActivityEvent>{});
    }
    slot->token_digest = token_digest(token);
    return persist_locked();
}

bool Service::has_learner(const std::string& learner_id) const {
    std::shared_lock lock(state_mutex_);
    return learners_.contains(learner_id);
}

DataFile Service::collect_data() const {
    DataFile data;
    for (const auto& [id, l] : learners_) {
        data.learners.push_back(
            LearnerData{l->id, l->token_digest, l->workspace->store.state(), l->workspace->activity.events()});
    }
    return data;
}

DataFile Service::snapshot_data() const {
    std::shared_lock lock(state_mutex_);
    return collect_data();
}

Result<void> Service::persist_locked() { return persist_store(collect_data(), config_.data_path); }

Service::Learner* Service::authenticate(const std::string& token) {
    if (token.empty()) {
        return nullptr;
    }
    const std::string digest = token_digest(token);
    for (auto& [id, l] : learners_) {
        if (!l->token_digest.empty() && l->token_digest == digest) {
            return l.get();
        }
    }
    return nullptr;
}

Response Service::route(const Request& request) {
    try {
        const auto seg = split_path(request.path);
        const auto methods = allowed_methods(seg);
        if (methods.empty()) {
            return error_response(make_error(ErrorCode::not_found, "no such endpoint: " + request.path));
        }
        if (std::find(methods.begin(), methods.end(), request.method) == methods.end()) {
            return error_response(make_error(ErrorCode::method_not_allowed, request.method + " " + request.path));
        }
        if (seg[0] == "healthz") {
            return ok(200, json{{"status", "ok"}});
        }
        Learner* learner = nullptr;
        {
            std::shared_lock lock(state_mutex_);
            learner = authenticate(request.token);
        }
        if (learner == nullptr) {
            return error_response(make_error(ErrorCode::unauthorized, "missing or invalid learner token"));
        }
        return dispatch(*learner, request);
    } catch (const std::exception& e) {
        std::cerr << "learnstory: internal error on " << request.method << " " << request.path << ": " << e.what() << "\n";
        return error_response(make_error(ErrorCode::internal, "internal error"));
    }
}

Response Service::dispatch(Learner& learner, const Request& request) {
    const auto seg = split_path(request.path);
    const auto& method = request.method;
    Workspace& ws = *learner.workspace;
    CurationStore& store = ws.store;

    // Runs a mutation under the exclusive lock and persists it. A mutation
    // that cannot be persisted is rolled back.
    auto mutate = [&](auto&& fn) -> Response {
        std::unique_lock lock(state_mutex_);
        StoreState before = store.state();
        std::vector<ActivityEvent> events_before = ws.activity.events();
        Response r = fn();
        if (r.status / 100 == 2) {
            if (auto saved = persist_locked(); !saved) {
                std::cerr << "learnstory: " << saved.error().describe() << "\n";
                ws.restore(std::move(before), std::move(events_before));
                return error_response(saved.error());
            }
        }
        return r;
    };
    auto body = body_object(request);
    if (method == "POST" && !body) {
        return error_response(body.error());
    }

    if (seg[0] == "resources" && seg.size() == 1) {
        if (method == "GET") {
            std::shared_lock lock(state_mutex_);
            json list = json::array();
            for (const auto& r : store.resources()) list.push_back(codec::encode(r));
            return ok(200, json{{"resources", std::move(list)}});
        }
        auto url = required_string(*body, "url");
        if (!url) return error_response(url.error());
        std::string title = body->value("title", "");
        auto kind = parse_resource_kind(body->value("kind", "web-page"));
        if (!kind) return error_response(make_error(ErrorCode::invalid_request, "kind must be web-page, video or other"));
        return mutate([&] {
            const bool existed = store.find_resource_by_url(*url).has_value();
            auto r = store.add_resource(*url, title, *kind);
            if (!r) return error_response(r.error());
            return ok(existed ? 200 : 201, codec::encode(*r));
        });
    }
    if (seg[0] == "resources" && seg.size() == 3) {
        auto rating = body->find("rating");
        if (rating == body->end() || !rating->is_number_integer()) {
            return error_response(make_error(ErrorCode::invalid_request, "field \"rating\" must be an integer"));
        }
        const auto value = rating->get<std::int64_t>();
        return mutate([&] {
            const auto clamped = std::clamp<std::int64_t>(value, std::numeric_limits<int>::min(),
                                                          std::numeric_limits<int>::max());
            auto r = store.rate_resource(ResourceId{seg[1]}, static_cast<int>(clamped));
            if (!r) return error_response(r.error());
            return ok(200, codec::encode(*r));
        });
    }
    if (seg[0] == "reflections") {
        if (method == "GET") {
            std::shared_lock lock(state_mutex_);
            const auto filter = query_param(request, "resource_id");
            if (filter && store.find_resource(ResourceId{*filter}) == nullptr) {
                return error_response(make_error(ErrorCode::unknown_resource, *filter));
            }
            json list = json::array();
            const auto all = filter ? store.reflections_for(ResourceId{*filter}) : store.reflections();
            for (const auto& r : all) list.push_back(reflection_json(store, r));
            return ok(200, json{{"reflections", std::move(list)}});
        }
        auto resource_id = required_string(*body, "resource_id");
        if (!resource_id) return error_response(resource_id.error());
        auto text = body->find("text");
        if (text == body->end() || !text->is_string()) {
            return error_response(make_error(ErrorCode::invalid_request, "field \"text\" must be a string"));
        }
        auto kind = parse_reflection_kind(body->value("kind", "note"));
        if (!kind) return error_response(make_error(ErrorCode::invalid_request, "kind must be note, question or intention"));
        std::optional<std::int64_t> offset;
        if (auto o = body->find("video_offset"); o != body->end() && !o->is_null()) {
            if (!o->is_number_integer()) {
                return error_response(make_error(ErrorCode::invalid_request, "video_offset must be an integer"));
            }
            offset = o->get<std::int64_t>();
        }
        const std::string text_value = text->get<std::string>();
        return mutate([&] {
            auto r = store.add_reflection(ResourceId{*resource_id}, text_value, *kind, offset);
            if (!r) return error_response(r.error());
            return ok(201, reflection_json(store, *r));
        });
    }
    if (seg[0] == "tags" && seg.size() == 1) {
        if (method == "GET") {
            std::shared_lock lock(state_mutex_);
            json list = json::array();
            for (const auto& t : store.tags()) {
                json j = codec::encode(t);
                j["resource_count"] = store.assignment_count(t.id);
                list.push_back(std::move(j));
            }
            return ok(200, json{{"tags", std::move(list)}});
        }
        auto name = required_string(*body, "name");
        if (!name) return error_response(name.error());
        return mutate([&] {
            const bool existed = store.find_tag_by_name(*name) != nullptr;
            auto t = store.create_tag(*name);
            if (!t) return error_response(t.error());
            return ok(existed ? 200 : 201, codec::encode(*t));
        });
    }
    if (seg[0] == "tags" && seg.size() == 2) {  // merge
        auto source = required_string(*body, "source_tag_id");
        if (!source) return error_response(source.error());
        auto target = required_string(*body, "target_tag_id");
        if (!target) return error_response(target.error());
        return mutate([&] {
            auto t = store.merge_tags(TagId{*source}, TagId{*target});
            if (!t) return error_response(t.error());
            json j = codec::encode(*t);
            j["resource_count"] = store.assignment_count(t->id);
            return ok(200, j);
        });
    }
    if (seg[0] == "tags" && seg[2] == "assign") {
        auto resource_id = required_string(*body, "resource_id");
        if (!resource_id) return error_response(resource_id.error());
        return mutate([&] {
            auto a = store.assign_tag(TagId{seg[1]}, ResourceId{*resource_id});
            if (!a) return error_response(a.error());
            return ok(200, codec::encode(*a));
        });
    }
    if (seg[0] == "tags" && seg[2] == "resources") {
        std::shared_lock lock(state_mutex_);
        auto list = store.resources_by_tag(TagId{seg[1]});
        if (!list) return error_response(list.error());
        json out = json::array();
        for (const auto& r : *list) out.push_back(codec::encode(r));
        return ok(200, json{{"resources", std::move(out)}});
    }
    if (seg[0] == "stories" && seg.size() == 1) {
        return create_story(learner, request);
    }
    if (seg[0] == "stories" && seg[1] == "latest") {
        std::shared_lock lock(state_mutex_);
        std::optional<TagId> scope;
        if (auto t = query_param(request, "tag_id")) {
            if (store.find_tag(TagId{*t}) == nullptr) {
                return error_response(make_error(ErrorCode::unknown_tag, *t));
            }
            scope = TagId{*t};
        }
        auto s = latest_story(store, scope);
        if (!s) return error_response(s.error());
        return ok(200, story_json(*s));
    }
    if (seg[0] == "stories" && seg[1] == "jobs") {
        return story_job(learner, seg[2]);
    }
    if (seg[0] == "stories" && seg[2] == "adapt") {
        const auto platform = query_param(request, "platform");
        if (!platform) {
            return error_response(make_error(ErrorCode::invalid_request, "query parameter \"platform\" is required"));
        }
        const PlatformProfile* profile = config_.find_profile(*platform);
        if (profile == nullptr) {
            return error_response(make_error(ErrorCode::unknown_platform, *platform));
        }
        std::shared_lock lock(state_mutex_);
        const Story* story = store.find_story(StoryId{seg[1]});
        if (story == nullptr) {
            return error_response(make_error(ErrorCode::unknown_story, seg[1]));
        }
        auto posts = adapt_for_platform(*story, *profile);
        if (!posts) return error_response(posts.error());
        json list = json::array();
        for (const auto& p : *posts) list.push_back(codec::encode(p));
        return ok(200, json{{"platform", profile->name}, {"story_id", story->id.value}, {"posts", std::move(list)}});
    }
    if (seg[0] == "export") {
        return export_tag(learner, seg[1]);
    }
    if (seg[0] == "activity") {
        std::shared_lock lock(state_mutex_);
        if (seg[1] == "snapshot") {
            return ok(200, codec::encode(ws.activity.compute_snapshot(store.now())));
        }
        json list = json::array();
        for (const auto& d : radar_data(store)) list.push_back(codec::encode(d));
        return ok(200, json{{"radar", std::move(list)}});
    }
    if (seg[0] == "nudge") {
        auto host = required_string(*body, "visited_host");
        if (!host) return error_response(host.error());
        std::optional<Timestamp> last;
        if (auto l = body->find("last_nudge_at"); l != body->end() && !l->is_null()) {
            std::optional<Timestamp> parsed = l->is_string() ? parse_iso8601(l->get<std::string>()) : std::nullopt;
            if (!parsed) {
                return error_response(make_error(ErrorCode::invalid_request, "last_nudge_at must be an ISO-8601 UTC timestamp"));
            }
            last = parsed;
        }
        std::shared_lock lock(state_mutex_);
        const Timestamp now = store.now();
        std::optional<StoryRef> ref;
        if (auto s = latest_story(store)) {
            ref = StoryRef{s->id, s->tag_id, s->title};
        }
        auto payload = evaluate_nudge(*host, now, config_.nudge_policy, ws.activity.compute_snapshot(now), last, ref);
        return ok(200, json{{"nudge", payload ? codec::encode(*payload) : json(nullptr)}, {"evaluated_at", format_iso8601(now)}});
    }
    return error_response(make_error(ErrorCode::not_found, request.path));
}

Result<Story> Service::run_generation(Learner& learner, const StoryInput& input) {
    auto story = generate_story(input, provider_.get(), config_.fallback_enabled);
    if (!story) {
        return story;
    }
    std::unique_lock lock(state_mutex_);
    Workspace& ws = *learner.workspace;
    StoreState before = ws.store.state();
    std::vector<ActivityEvent> events_before = ws.activity.events();
    auto stored = ws.store.add_story(std::move(story).value());
    if (!stored) {
        return stored;
    }
    if (auto saved = persist_locked(); !saved) {
        ws.restore(std::move(before), std::move(events_before));
        return saved.error();
    }
    return stored;
}

Response Service::create_story(Learner& learner, const Request& request) {
    auto body = body_object(request);
    if (!body) return error_response(body.error());
    auto tag_id = required_string(*body, "tag_id");
    if (!tag_id) return error_response(tag_id.error());
    std::size_t min_resources = 1;
    if (auto m = body->find("min_resources"); m != body->end()) {
        if (!m->is_number_unsigned()) {
            return error_response(make_error(ErrorCode::invalid_request, "min_resources must be a non-negative integer"));
        }
        min_resources = m->get<std::size_t>();
    }
    Result<StoryInput> input = [&] {
        std::shared_lock lock(state_mutex_);
        return collect_story_input(learner.workspace->store, TagId{*tag_id}, min_resources);
    }();
    if (!input) {
        return error_response(input.error());
    }
    if (!config_.background_generation) {
        auto story = run_generation(learner, *input);
        if (!story) return error_response(story.error());
        return ok(201, story_json(*story));
    }

    std::lock_guard lock(jobs_mutex_);
    const std::string job_id = format_sequential_id("job", next_job_++);
    jobs_[job_id] = Job{"pending", std::nullopt, std::nullopt, learner.id};
    workers_.emplace_back([this, &learner, job_id, in = std::move(input).value()] {
        auto story = run_generation(learner, in);
        std::lock_guard jl(jobs_mutex_);
        Job& job = jobs_[job_id];
        if (story) {
            job.status = "done";
            job.story_id = story->id;
        } else {
            job.status = "failed";
            job.error = story.error();
        }
    });
    return ok(202, json{{"job_id", job_id}, {"status", "pending"}});
}

Response Service::story_job(const Learner& learner, const std::string& job_id) {
    std::lock_guard lock(jobs_mutex_);
    auto it = jobs_.find(job_id);
    if (it == jobs_.end() || it->second.learner_id != learner.id) {
        return error_response(make_error(ErrorCode::unknown_job, job_id));
    }
    const Job& job = it->second;
    json j{{"job_id", job_id}, {"status", job.status}, {"story_id", nullptr}, {"error", nullptr}};
    if (job.story_id) j["story_id"] = job.story_id->value;
    if (job.error) j["error"] = json{{"code", code_name(job.error->code)}, {"message", job.error->message}};
    return ok(200, j);
}

Response Service::export_tag(Learner& learner, const std::string& tag_ref) {
    Result<RepoLayout> layout = make_error(ErrorCode::internal);
    {
        std::shared_lock lock(state_mutex_);
        const CurationStore& store = learner.workspace->store;
        const Tag* tag = store.find_tag(TagId{tag_ref});
        if (tag == nullptr) {
            tag = store.find_tag_by_name(tag_ref);
        }
        if (tag == nullptr) {
            return error_response(make_error(ErrorCode::unknown_tag, tag_ref));
        }
        std::optional<Story> story;
        if (auto s = latest_story(store, tag->id)) {
            story = *s;
        }
        layout = build_repo_layout(store, tag->id, story);
    }
    if (!layout) {
        return error_response(layout.error());
    }
    json out{{"layout", codec::encode(*layout)}, {"pushed", false}, {"receipt", nullptr}};
    if (repo_host_) {
        std::lock_guard lock(export_mutex_);
        auto receipt = push_repository(*layout, *repo_host_, config_.repo_host.private_repos, clock_);
        if (!receipt) {
            return error_response(receipt.error());
        }
        out["pushed"] = true;
        out["receipt"] = codec::encode(*receipt);
    }
    return ok(200, out);
}

} // namespace learnstory
