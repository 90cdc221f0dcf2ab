#pragma once

#include "learnstory/activity.hpp"
#include "learnstory/config.hpp"
#include "learnstory/curation_store.hpp"
#include "learnstory/exporter.hpp"
#include "learnstory/persistence.hpp"
#include "learnstory/story_engine.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <thread>
#include <vector>

namespace learnstory {

struct Request {
    std::string method;
    std::string path;
    std::multimap<std::string, std::string> query;
    std::string body;
    std::string token;  // bearer token, empty when absent
};

struct Response {
    int status{200};
    std::string body;  // JSON
};

/// One learner's store and activity log, wired so store mutations land in
/// the log.
class Workspace {
public:
    Workspace(Clock clock, StoreState state, std::vector<ActivityEvent> events);
    Workspace(const Workspace&) = delete;
    Workspace& operator=(const Workspace&) = delete;

    /// Replaces store and log contents, keeping the wiring.
    void restore(StoreState state, std::vector<ActivityEvent> events);

    CurationStore store;
    ActivityLog activity;

private:
    Clock clock_;
};

std::string token_digest(std::string_view token);

/// Generates a random URL-safe learner token.
std::string generate_token();

/// HTTP/JSON surface over the learner workspaces. route() never throws:
/// failures become 4xx/5xx responses with {"error":{"code","message"}}.
///
/// Single writer: mutations hold the exclusive state lock and persist the
/// data file before responding; reads share the lock. Story generation calls
/// the provider outside the lock and commits under it.
class Service {
public:
    Service(ServiceConfig config, DataFile data, std::unique_ptr<TextProvider> provider,
            std::unique_ptr<RepoHostClient> repo_host, Clock clock = system_clock());
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    Response route(const Request& request);

    /// Registers or rotates the learner's token (one active token per
    /// learner). Persists.
    Result<void> set_learner_token(const std::string& learner_id, std::string_view token);
    [[nodiscard]] bool has_learner(const std::string& learner_id) const;

    /// Waits for background story jobs.
    void drain_jobs();

    [[nodiscard]] DataFile snapshot_data() const;
    [[nodiscard]] const ServiceConfig& config() const noexcept { return config_; }

private:
    struct Learner {
        std::string id;
        std::string token_digest;
        std::unique_ptr<Workspace> workspace;
    };

    struct Job {
        std::string status{"pending"};  // pending | done | failed
        std::optional<StoryId> story_id;
        std::optional<Error> error;
        std::string learner_id;
    };

    Learner* authenticate(const std::string& token);
    Result<void> persist_locked();
    DataFile collect_data() const;

    Response dispatch(Learner& learner, const Request& request);
    Response create_story(Learner& learner, const Request& request);
    Response story_job(const Learner& learner, const std::string& job_id);
    Response export_tag(Learner& learner, const std::string& tag_ref);
    Result<Story> run_generation(Learner& learner, const StoryInput& input);

    ServiceConfig config_;
    std::unique_ptr<TextProvider> provider_;
    std::unique_ptr<RepoHostClient> repo_host_;
    Clock clock_;

    mutable std::shared_mutex state_mutex_;
    std::map<std::string, std::unique_ptr<Learner>> learners_;

    std::mutex jobs_mutex_;
    std::map<std::string, Job> jobs_;
    std::uint64_t next_job_{1};
    std::vector<std::thread> workers_;

    std::mutex export_mutex_;
};

} // namespace learnstory
