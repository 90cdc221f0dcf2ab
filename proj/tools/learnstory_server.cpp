// learnstory-server: HTTP/JSON service for curation, stories, export and
// activity monitoring.

#include "learnstory/config.hpp"
#include "learnstory/http_clients.hpp"
#include "learnstory/http_server.hpp"
#include "learnstory/persistence.hpp"
#include "learnstory/service.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <cstdlib>
#include <fcntl.h>
#include <iostream>
#include <pthread.h>
#include <thread>
#include <unistd.h>

namespace {

constexpr const char* kDefaultLearner = "default";

int fail(const std::string& message) {
    std::cerr << "learnstory-server: " << message << "\n";
    return 2;
}

bool write_token_file(const std::filesystem::path& path, const std::string& token) {
    const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0600);
    if (fd < 0) {
        return false;
    }
    const std::string line = token + "\n";
    const bool ok = ::write(fd, line.data(), line.size()) == static_cast<ssize_t>(line.size());
    ::close(fd);
    return ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"learnstory-server: learning stories from curated resources and reflections"};
    std::string config_path;
    std::string listen;
    std::string data;
    bool no_provider = false;
    app.add_option("--config", config_path, "Config file (JSON); defaults to $LEARNSTORY_CONFIG");
    app.add_option("--listen", listen, "host:port to listen on (port 0 picks a free port)");
    app.add_option("--data", data, "Data file path");
    app.add_flag("--no-provider", no_provider, "Never call the text provider; always use the offline generator");
    CLI11_PARSE(app, argc, argv);

    using namespace learnstory;

    if (config_path.empty()) {
        if (const char* env = std::getenv(kEnvConfigPath); env != nullptr && *env != '\0') {
            config_path = env;
        }
    }
    ServiceConfig config;
    if (!config_path.empty()) {
        auto loaded = load_config(config_path);
        if (!loaded) {
            return fail(loaded.error().describe());
        }
        config = std::move(loaded).value();
    }
    apply_environment(config);
    if (!listen.empty()) config.listen_address = listen;
    if (!data.empty()) config.data_path = data;
    if (no_provider) {
        config.provider_credentials.reset();
        config.fallback_enabled = true;
    }
    if (auto valid = validate_config(config); !valid) {
        return fail(valid.error().describe());
    }
    const auto address = parse_listen_address(config.listen_address);
    if (!address) {
        return fail(address.error().describe());
    }

    auto stored = load_store(config.data_path);
    if (!stored) {
        return fail(stored.error().describe());
    }
    const bool first_run = stored->learners.empty();

    std::unique_ptr<TextProvider> provider;
    if (config.provider_credentials) {
        provider = std::make_unique<HttpTextProvider>(config.provider, *config.provider_credentials);
    }
    std::unique_ptr<RepoHostClient> repo_host;
    if (config.repo_host_credentials) {
        repo_host = std::make_unique<GitHubRepoHost>(config.repo_host, *config.repo_host_credentials);
    }

    Service service(config, std::move(stored).value(), std::move(provider), std::move(repo_host));

    if (const char* token = std::getenv(kEnvLearnerToken); token != nullptr && *token != '\0') {
        if (auto set = service.set_learner_token(kDefaultLearner, token); !set) {
            return fail(set.error().describe());
        }
    } else if (first_run) {
        const std::string token = generate_token();
        std::filesystem::path token_path = config.data_path;
        token_path += ".token";
        if (!write_token_file(token_path, token)) {
            return fail("cannot write learner token file " + token_path.string());
        }
        if (auto set = service.set_learner_token(kDefaultLearner, token); !set) {
            return fail(set.error().describe());
        }
        std::cerr << "learnstory-server: learner token written to " << token_path.string() << "\n";
    }

    // SIGINT/SIGTERM are taken by a dedicated thread so the server stops
    // outside signal context.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    HttpServer server(service);
    auto port = server.bind(address->host, address->port);
    if (!port) {
        return fail(port.error().describe());
    }
    std::cout << "learnstory-server listening on " << address->host << ":" << *port << std::endl;

    std::thread waiter([&] {
        int sig = 0;
        sigwait(&signals, &sig);
        server.stop();
    });
    server.listen();
    // Wake the waiter if listen() returned for another reason.
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
    service.drain_jobs();
    return 0;
}
