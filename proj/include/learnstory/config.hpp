#pragma once

#include "learnstory/activity.hpp"
#include "learnstory/result.hpp"
#include "learnstory/thread.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace learnstory {

inline constexpr const char* kEnvConfigPath = "LEARNSTORY_CONFIG";
inline constexpr const char* kEnvProviderKey = "LEARNSTORY_PROVIDER_KEY";
inline constexpr const char* kEnvRepoHostToken = "LEARNSTORY_REPO_HOST_TOKEN";
inline constexpr const char* kEnvLearnerToken = "LEARNSTORY_LEARNER_TOKEN";

enum class ProviderFormat { openai_chat, plain };

struct ProviderSettings {
    std::string endpoint{"https://api.openai.com/v1/chat/completions"};
    std::string model{"gpt-4o-mini"};
    ProviderFormat format{ProviderFormat::openai_chat};
    int timeout_seconds{60};
};

struct RepoHostSettings {
    std::string api_base{"https://api.github.com"};
    bool private_repos{true};
};

struct ServiceConfig {
    std::string listen_address{"127.0.0.1:8787"};
    std::filesystem::path data_path{"learnstory-data.json"};
    std::optional<std::string> provider_credentials;
    std::optional<std::string> repo_host_credentials;
    bool fallback_enabled{true};
    std::vector<PlatformProfile> platform_profiles{default_platform_profiles()};
    NudgePolicy nudge_policy;
    bool background_generation{false};
    ProviderSettings provider;
    RepoHostSettings repo_host;

    [[nodiscard]] const PlatformProfile* find_profile(std::string_view name) const;
};

/// Parses the JSON config text. Unknown keys are rejected.
Result<ServiceConfig> parse_config(std::string_view text);
Result<ServiceConfig> load_config(const std::filesystem::path& path);

/// Fills credentials from LEARNSTORY_PROVIDER_KEY and
/// LEARNSTORY_REPO_HOST_TOKEN when set.
void apply_environment(ServiceConfig& config);

/// Fallback must stay on without provider credentials; profiles and the
/// nudge policy must be valid.
Result<void> validate_config(const ServiceConfig& config);

struct ListenAddress {
    std::string host;
    int port{0};
};
Result<ListenAddress> parse_listen_address(std::string_view address);

} // namespace learnstory
