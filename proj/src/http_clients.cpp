#include "learnstory/http_clients.hpp"

#include "json_codec.hpp"
#include "learnstory/url.hpp"

#include <httplib.h>

namespace learnstory {

using codec::json;

namespace {

struct Endpoint {
    std::string origin;  // scheme://host[:port]
    std::string prefix;  // path, no trailing slash
};

Result<Endpoint> split_endpoint(const std::string& url) {
    auto parsed = parse_url(url);
    if (!parsed) {
        return parsed.error();
    }
    Endpoint e;
    e.origin = parsed->scheme + "://" + parsed->authority;
    e.prefix = parsed->path;
    while (!e.prefix.empty() && e.prefix.back() == '/') {
        e.prefix.pop_back();
    }
    if (parsed->has_query) {
        e.prefix += "?" + parsed->query;
    }
    return e;
}

std::string describe(const httplib::Result& res) {
    if (!res) {
        return "transport error: " + httplib::to_string(res.error());
    }
    std::string body = res->body.substr(0, 200);
    return "HTTP " + std::to_string(res->status) + (body.empty() ? "" : ": " + body);
}

} // namespace

std::string base64_encode(std::string_view data) {
    static constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    out.reserve((data.size() + 2) / 3 * 4);
    std::size_t i = 0;
    for (; i + 2 < data.size(); i += 3) {
        const auto n = (static_cast<unsigned char>(data[i]) << 16) | (static_cast<unsigned char>(data[i + 1]) << 8) |
                       static_cast<unsigned char>(data[i + 2]);
        out += kAlphabet[(n >> 18) & 63];
        out += kAlphabet[(n >> 12) & 63];
        out += kAlphabet[(n >> 6) & 63];
        out += kAlphabet[n & 63];
    }
    if (i + 1 == data.size()) {
        const auto n = static_cast<unsigned char>(data[i]) << 16;
        out += kAlphabet[(n >> 18) & 63];
        out += kAlphabet[(n >> 12) & 63];
        out += "==";
    } else if (i + 2 == data.size()) {
        const auto n = (static_cast<unsigned char>(data[i]) << 16) | (static_cast<unsigned char>(data[i + 1]) << 8);
        out += kAlphabet[(n >> 18) & 63];
        out += kAlphabet[(n >> 12) & 63];
        out += kAlphabet[(n >> 6) & 63];
        out += '=';
    }
    return out;
}

HttpTextProvider::HttpTextProvider(ProviderSettings settings, std::string api_key)
    : settings_(std::move(settings)), api_key_(std::move(api_key)) {}

std::string HttpTextProvider::name() const {
    return settings_.format == ProviderFormat::openai_chat ? "openai:" + settings_.model : "http";
}

Result<std::string> HttpTextProvider::generate(const PromptSpec& prompt) {
    auto endpoint = split_endpoint(settings_.endpoint);
    if (!endpoint) {
        return make_error(ErrorCode::provider_failure, "bad provider endpoint: " + endpoint.error().describe());
    }
    httplib::Client client(endpoint->origin);
    client.set_connection_timeout(settings_.timeout_seconds, 0);
    client.set_read_timeout(settings_.timeout_seconds, 0);
    client.set_write_timeout(settings_.timeout_seconds, 0);
    httplib::Headers headers{{"Authorization", "Bearer " + api_key_}};

    json request;
    if (settings_.format == ProviderFormat::openai_chat) {
        request = json{{"model", settings_.model},
                       {"messages",
                        json::array({json{{"role", "system"}, {"content", prompt.system_text}},
                                     json{{"role", "user"}, {"content", prompt.user_text}}})}};
    } else {
        request = json{{"system_text", prompt.system_text}, {"user_text", prompt.user_text}};
    }
    auto res = client.Post(endpoint->prefix.empty() ? "/" : endpoint->prefix, headers, request.dump(), "application/json");
    if (!res || res->status / 100 != 2) {
        return make_error(ErrorCode::provider_failure, describe(res));
    }
    if (settings_.format == ProviderFormat::plain) {
        return res->body;
    }
    try {
        const auto body = json::parse(res->body);
        return body.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
        return make_error(ErrorCode::provider_failure, std::string("unexpected provider response: ") + e.what());
    }
}

GitHubRepoHost::GitHubRepoHost(RepoHostSettings settings, std::string token)
    : settings_(std::move(settings)), token_(std::move(token)) {}

namespace {

struct Api {
    httplib::Client client;
    std::string prefix;
    httplib::Headers headers;
};

Result<std::unique_ptr<Api>> open_api(const RepoHostSettings& settings, const std::string& token) {
    auto endpoint = split_endpoint(settings.api_base);
    if (!endpoint) {
        return make_error(ErrorCode::remote_failure, "bad repository host URL: " + endpoint.error().describe());
    }
    auto api = std::make_unique<Api>(Api{httplib::Client(endpoint->origin), endpoint->prefix,
                                         {{"Authorization", "Bearer " + token},
                                          {"Accept", "application/vnd.github+json"},
                                          {"User-Agent", "learnstory"}}});
    api->client.set_connection_timeout(30, 0);
    api->client.set_read_timeout(30, 0);
    return api;
}

} // namespace

Result<std::string> GitHubRepoHost::owner() {
    if (!owner_.empty()) {
        return owner_;
    }
    auto api = open_api(settings_, token_);
    if (!api) return api.error();
    auto res = (*api)->client.Get((*api)->prefix + "/user", (*api)->headers);
    if (!res || res->status != 200) {
        return make_error(ErrorCode::remote_failure, "GET /user: " + describe(res));
    }
    try {
        owner_ = json::parse(res->body).at("login").get<std::string>();
    } catch (const json::exception& e) {
        return make_error(ErrorCode::remote_failure, std::string("GET /user: ") + e.what());
    }
    return owner_;
}

Result<std::string> GitHubRepoHost::ensure_repository(const std::string& name, bool private_repo) {
    auto login = owner();
    if (!login) return login.error();
    auto api = open_api(settings_, token_);
    if (!api) return api.error();
    auto& [client, prefix, headers] = **api;

    auto html_url = [](const std::string& body) -> std::string {
        try {
            return json::parse(body).value("html_url", "");
        } catch (const json::exception&) {
            return {};
        }
    };
    auto res = client.Get(prefix + "/repos/" + *login + "/" + name, headers);
    if (res && res->status == 200) {
        return html_url(res->body);
    }
    if (!res || res->status != 404) {
        return make_error(ErrorCode::remote_failure, "GET repository: " + describe(res));
    }
    const json body{{"name", name}, {"private", private_repo}, {"auto_init", false}};
    res = client.Post(prefix + "/user/repos", headers, body.dump(), "application/json");
    if (!res || res->status / 100 != 2) {
        return make_error(ErrorCode::remote_failure, "create repository: " + describe(res));
    }
    return html_url(res->body);
}

Result<void> GitHubRepoHost::write_file(const std::string& repo, const std::string& path, const std::string& content) {
    auto login = owner();
    if (!login) return login.error();
    auto api = open_api(settings_, token_);
    if (!api) return api.error();
    auto& [client, prefix, headers] = **api;

    const std::string resource = prefix + "/repos/" + *login + "/" + repo + "/contents/" + path;
    json body{{"message", "Update " + path}, {"content", base64_encode(content)}};
    auto existing = client.Get(resource, headers);
    if (existing && existing->status == 200) {
        try {
            body["sha"] = json::parse(existing->body).at("sha").get<std::string>();
        } catch (const json::exception& e) {
            return make_error(ErrorCode::remote_failure, std::string("GET contents: ") + e.what());
        }
    } else if (!existing || existing->status != 404) {
        return make_error(ErrorCode::remote_failure, "GET contents: " + describe(existing));
    }
    auto res = client.Put(resource, headers, body.dump(), "application/json");
    if (!res || res->status / 100 != 2) {
        return make_error(ErrorCode::remote_failure, "PUT contents: " + describe(res));
    }
    return {};
}

} // namespace learnstory
