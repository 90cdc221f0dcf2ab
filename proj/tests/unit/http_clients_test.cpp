#include "learnstory/http_clients.hpp"

#include <doctest.h>
#include <httplib.h>
#include <json.hpp>

#include <map>
#include <mutex>
#include <thread>

using namespace learnstory;
using nlohmann::json;

namespace {

// Runs an httplib server on a free loopback port for the test's lifetime.
class LocalServer {
public:
    LocalServer() {
        port_ = server.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }
    ~LocalServer() {
        server.stop();
        thread_.join();
    }
    [[nodiscard]] std::string base() const { return "http://127.0.0.1:" + std::to_string(port_); }

    httplib::Server server;

private:
    int port_{0};
    std::thread thread_;
};

std::string base64_decode(const std::string& in) {
    static const std::string alphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    int val = 0;
    int bits = -8;
    for (char c : in) {
        const auto pos = alphabet.find(c);
        if (pos == std::string::npos) break;
        val = (val << 6) + static_cast<int>(pos);
        bits += 6;
        if (bits >= 0) {
            out += static_cast<char>((val >> bits) & 0xFF);
            bits -= 8;
        }
    }
    return out;
}

const PromptSpec kPrompt{"system words", "user words"};

} // namespace

TEST_CASE("base64") {
    CHECK(base64_encode("") == "");
    CHECK(base64_encode("f") == "Zg==");
    CHECK(base64_encode("fo") == "Zm8=");
    CHECK(base64_encode("foo") == "Zm9v");
    CHECK(base64_encode("foobar") == "Zm9vYmFy");
    const std::string bytes = "日本語 — \x01\xff";
    CHECK(base64_decode(base64_encode(bytes)) == bytes);
}

TEST_CASE("chat-completions provider") {
    LocalServer srv;
    json seen;
    std::string auth;
    srv.server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
        seen = json::parse(req.body);
        auth = req.get_header_value("Authorization");
        res.set_content(json{{"choices", {{{"message", {{"content", "# T\n## Reflections\n"}}}}}}}.dump(),
                        "application/json");
    });
    ProviderSettings settings;
    settings.endpoint = srv.base() + "/v1/chat/completions";
    settings.model = "tiny";
    HttpTextProvider provider(settings, "sk-secret");
    CHECK(provider.name() == "openai:tiny");
    auto out = provider.generate(kPrompt);
    REQUIRE_MESSAGE(out, out.error().describe());
    CHECK(*out == "# T\n## Reflections\n");
    CHECK(auth == "Bearer sk-secret");
    CHECK(seen["model"] == "tiny");
    CHECK(seen["messages"][0]["content"] == "system words");
    CHECK(seen["messages"][1]["role"] == "user");
    CHECK(seen["messages"][1]["content"] == "user words");
}

TEST_CASE("plain provider") {
    LocalServer srv;
    srv.server.Post("/gen", [&](const httplib::Request& req, httplib::Response& res) {
        const auto body = json::parse(req.body);
        res.set_content("echo: " + body["user_text"].get<std::string>(), "text/plain");
    });
    ProviderSettings settings;
    settings.endpoint = srv.base() + "/gen";
    settings.format = ProviderFormat::plain;
    HttpTextProvider provider(settings, "k");
    CHECK(provider.name() == "http");
    CHECK(*provider.generate(kPrompt) == "echo: user words");
}

TEST_CASE("provider failures") {
    LocalServer srv;
    srv.server.Post("/down", [](const httplib::Request&, httplib::Response& res) { res.status = 503; });
    srv.server.Post("/junk", [](const httplib::Request&, httplib::Response& res) { res.set_content("{}", "application/json"); });
    srv.server.Post("/slow", [](const httplib::Request&, httplib::Response& res) {
        std::this_thread::sleep_for(std::chrono::milliseconds(2500));
        res.set_content("late", "text/plain");
    });
    ProviderSettings settings;
    settings.endpoint = srv.base() + "/down";
    CHECK(HttpTextProvider(settings, "k").generate(kPrompt).error().code == ErrorCode::provider_failure);
    settings.endpoint = srv.base() + "/junk";
    CHECK(HttpTextProvider(settings, "k").generate(kPrompt).error().code == ErrorCode::provider_failure);
    settings.endpoint = srv.base() + "/slow";
    settings.format = ProviderFormat::plain;
    settings.timeout_seconds = 1;
    CHECK(HttpTextProvider(settings, "k").generate(kPrompt).error().code == ErrorCode::provider_failure);
    settings.endpoint = "http://127.0.0.1:1/nothing";
    CHECK(HttpTextProvider(settings, "k").generate(kPrompt).error().code == ErrorCode::provider_failure);
    settings.endpoint = "not a url";
    CHECK(HttpTextProvider(settings, "k").generate(kPrompt).error().code == ErrorCode::provider_failure);
}

TEST_CASE("GitHub-style host creates repositories and upserts files") {
    LocalServer srv;
    std::mutex m;
    std::map<std::string, bool> repos;                       // name -> private
    std::map<std::string, std::pair<std::string, int>> files;  // path -> (content, version)
    int user_calls = 0;
    srv.server.Get("/api/user", [&](const httplib::Request& req, httplib::Response& res) {
        std::lock_guard lock(m);
        ++user_calls;
        if (req.get_header_value("Authorization") != "Bearer ghp-x") {
            res.status = 401;
            return;
        }
        res.set_content(R"({"login":"learner"})", "application/json");
    });
    srv.server.Get(R"(/api/repos/learner/([^/]+))", [&](const httplib::Request& req, httplib::Response& res) {
        std::lock_guard lock(m);
        const std::string name = req.matches[1];
        if (!repos.contains(name)) {
            res.status = 404;
            return;
        }
        res.set_content(json{{"html_url", "https://host/learner/" + name}}.dump(), "application/json");
    });
    srv.server.Post("/api/user/repos", [&](const httplib::Request& req, httplib::Response& res) {
        std::lock_guard lock(m);
        const auto body = json::parse(req.body);
        repos[body["name"]] = body["private"];
        res.status = 201;
        res.set_content(json{{"html_url", "https://host/learner/" + body["name"].get<std::string>()}}.dump(),
                        "application/json");
    });
    srv.server.Get(R"(/api/repos/learner/([^/]+)/contents/(.+))", [&](const httplib::Request& req, httplib::Response& res) {
        std::lock_guard lock(m);
        const std::string key = std::string(req.matches[1]) + "/" + std::string(req.matches[2]);
        auto it = files.find(key);
        if (it == files.end()) {
            res.status = 404;
            return;
        }
        res.set_content(json{{"sha", "sha" + std::to_string(it->second.second)}}.dump(), "application/json");
    });
    srv.server.Put(R"(/api/repos/learner/([^/]+)/contents/(.+))", [&](const httplib::Request& req, httplib::Response& res) {
        std::lock_guard lock(m);
        const std::string key = std::string(req.matches[1]) + "/" + std::string(req.matches[2]);
        const auto body = json::parse(req.body);
        auto it = files.find(key);
        if (it != files.end() && body.value("sha", "") != "sha" + std::to_string(it->second.second)) {
            res.status = 409;
            return;
        }
        const int version = it == files.end() ? 1 : it->second.second + 1;
        files[key] = {base64_decode(body["content"]), version};
        res.status = it == files.end() ? 201 : 200;
    });

    RepoHostSettings settings;
    settings.api_base = srv.base() + "/api/";
    GitHubRepoHost host(settings, "ghp-x");
    RepoLayout layout{"vue-basics", {{"README.md", "# Story\n"}, {"intro.md", "# Intro — café\n"}}};
    auto receipt = push_repository(layout, host);
    REQUIRE_MESSAGE(receipt, receipt.error().describe());
    CHECK(receipt->remote_url == "https://host/learner/vue-basics");
    CHECK(repos.at("vue-basics") == true);
    CHECK(files.at("vue-basics/intro.md").first == "# Intro — café\n");

    layout.files[0].second = "# Story v2\n";
    REQUIRE(push_repository(layout, host));
    CHECK(files.at("vue-basics/README.md") == std::pair<std::string, int>{"# Story v2\n", 2});
    CHECK(repos.size() == 1);
    CHECK(user_calls == 1);

    GitHubRepoHost wrong(settings, "bad-token");
    auto denied = push_repository(layout, wrong);
    REQUIRE_FALSE(denied);
    CHECK(denied.error().code == ErrorCode::remote_failure);
    CHECK(denied.error().message.find("bad-token") == std::string::npos);
}
