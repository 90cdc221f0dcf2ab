#include "learnstory/config.hpp"

#include "json_codec.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace learnstory {

using codec::json;
using codec::Reader;

namespace {

Seconds read_duration(const Reader& r) {
    if (r.raw().is_number_integer()) {
        return Seconds{r.integer()};
    }
    auto d = parse_duration(r.string());
    if (!d) {
        r.fail("expected a duration such as 3d, 6h, 90m or a number of seconds");
    }
    return *d;
}

void reject_unknown(const Reader& r, const std::set<std::string>& known) {
    if (!r.raw().is_object()) {
        r.fail("expected an object");
    }
    for (const auto& [key, value] : r.raw().items()) {
        if (!known.contains(key)) {
            r.fail("unknown key \"" + key + "\"");
        }
    }
}

} // namespace

const PlatformProfile* ServiceConfig::find_profile(std::string_view name) const {
    for (const auto& p : platform_profiles) {
        if (p.name == name) {
            return &p;
        }
    }
    return nullptr;
}

Result<ServiceConfig> parse_config(std::string_view text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        return make_error(ErrorCode::invalid_config, "syntax error at byte " + std::to_string(e.byte));
    }
    ServiceConfig cfg;
    try {
        const Reader r(root, "");
        reject_unknown(r, {"listen_address", "data_path", "provider_credentials", "repo_host_credentials",
                           "fallback_enabled", "platform_profiles", "nudge_policy", "background_generation",
                           "provider", "repo_host"});
        if (r.has("listen_address")) cfg.listen_address = r.field("listen_address").string();
        if (r.has("data_path")) cfg.data_path = r.field("data_path").string();
        if (r.has("provider_credentials") && !root["provider_credentials"].is_null()) {
            cfg.provider_credentials = r.field("provider_credentials").string();
        }
        if (r.has("repo_host_credentials") && !root["repo_host_credentials"].is_null()) {
            cfg.repo_host_credentials = r.field("repo_host_credentials").string();
        }
        if (r.has("fallback_enabled")) cfg.fallback_enabled = r.field("fallback_enabled").boolean();
        if (r.has("background_generation")) cfg.background_generation = r.field("background_generation").boolean();
        if (r.has("platform_profiles")) {
            cfg.platform_profiles.clear();
            const auto profiles = r.field("platform_profiles");
            for (std::size_t i = 0; i < profiles.size(); ++i) {
                reject_unknown(profiles.at(i), {"name", "char_limit", "numbering_format"});
                cfg.platform_profiles.push_back(codec::decode_profile(profiles.at(i)));
            }
        }
        if (r.has("nudge_policy")) {
            const auto n = r.field("nudge_policy");
            reject_unknown(n, {"enabled", "watched_domains", "staleness_threshold", "min_interval_between_nudges"});
            if (n.has("enabled")) cfg.nudge_policy.enabled = n.field("enabled").boolean();
            if (n.has("watched_domains")) {
                const auto domains = n.field("watched_domains");
                cfg.nudge_policy.watched_domains.clear();
                for (std::size_t i = 0; i < domains.size(); ++i) {
                    cfg.nudge_policy.watched_domains.push_back(domains.at(i).string());
                }
            }
            if (n.has("staleness_threshold")) {
                cfg.nudge_policy.staleness_threshold = read_duration(n.field("staleness_threshold"));
            }
            if (n.has("min_interval_between_nudges")) {
                cfg.nudge_policy.min_interval_between_nudges = read_duration(n.field("min_interval_between_nudges"));
            }
        }
        if (r.has("provider")) {
            const auto p = r.field("provider");
            reject_unknown(p, {"endpoint", "model", "format", "timeout_seconds"});
            if (p.has("endpoint")) cfg.provider.endpoint = p.field("endpoint").string();
            if (p.has("model")) cfg.provider.model = p.field("model").string();
            if (p.has("format")) {
                const auto f = p.field("format").string();
                if (f == "openai-chat") {
                    cfg.provider.format = ProviderFormat::openai_chat;
                } else if (f == "plain") {
                    cfg.provider.format = ProviderFormat::plain;
                } else {
                    p.field("format").fail("expected \"openai-chat\" or \"plain\"");
                }
            }
            if (p.has("timeout_seconds")) cfg.provider.timeout_seconds = static_cast<int>(p.field("timeout_seconds").integer());
        }
        if (r.has("repo_host")) {
            const auto h = r.field("repo_host");
            reject_unknown(h, {"api_base", "private_repos"});
            if (h.has("api_base")) cfg.repo_host.api_base = h.field("api_base").string();
            if (h.has("private_repos")) cfg.repo_host.private_repos = h.field("private_repos").boolean();
        }
    } catch (const codec::DecodeError& e) {
        return make_error(ErrorCode::invalid_config, "at " + e.where + ": " + e.what());
    }
    return cfg;
}

Result<ServiceConfig> load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        return make_error(ErrorCode::invalid_config, "cannot read config " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    auto cfg = parse_config(buf.str());
    if (!cfg) {
        return make_error(ErrorCode::invalid_config, path.string() + " " + cfg.error().message);
    }
    return cfg;
}

void apply_environment(ServiceConfig& config) {
    if (const char* key = std::getenv(kEnvProviderKey); key != nullptr && *key != '\0') {
        config.provider_credentials = key;
    }
    if (const char* token = std::getenv(kEnvRepoHostToken); token != nullptr && *token != '\0') {
        config.repo_host_credentials = token;
    }
}

Result<void> validate_config(const ServiceConfig& config) {
    if (!config.provider_credentials && !config.fallback_enabled) {
        return make_error(ErrorCode::invalid_config, "fallback_enabled must be true without provider credentials");
    }
    if (config.data_path.empty()) {
        return make_error(ErrorCode::invalid_config, "data_path is empty");
    }
    std::set<std::string> names;
    for (const auto& p : config.platform_profiles) {
        if (auto v = validate_profile(p); !v) {
            return make_error(ErrorCode::invalid_config, v.error().message);
        }
        if (!names.insert(p.name).second) {
            return make_error(ErrorCode::invalid_config, "duplicate platform profile " + p.name);
        }
    }
    if (auto v = validate_policy(config.nudge_policy); !v) {
        return v.error();
    }
    if (auto a = parse_listen_address(config.listen_address); !a) {
        return a.error();
    }
    return {};
}

Result<ListenAddress> parse_listen_address(std::string_view address) {
    const auto colon = address.rfind(':');
    if (colon == std::string_view::npos || colon == 0) {
        return make_error(ErrorCode::invalid_config, "listen address must be host:port");
    }
    ListenAddress out;
    out.host = std::string(address.substr(0, colon));
    if (out.host.size() > 2 && out.host.front() == '[' && out.host.back() == ']') {
        out.host = out.host.substr(1, out.host.size() - 2);
    }
    const auto port = address.substr(colon + 1);
    auto [ptr, ec] = std::from_chars(port.data(), port.data() + port.size(), out.port);
    if (ec != std::errc{} || ptr != port.data() + port.size() || out.port < 0 || out.port > 65535) {
        return make_error(ErrorCode::invalid_config, "bad port in listen address");
    }
    return out;
}

} // namespace learnstory
