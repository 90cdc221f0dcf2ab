#pragma once

#include "learnstory/config.hpp"
#include "learnstory/exporter.hpp"
#include "learnstory/story_engine.hpp"

#include <map>
#include <memory>
#include <string>

namespace learnstory {

/// Text provider over HTTP. openai_chat posts a chat-completions request and
/// reads choices[0].message.content; plain posts
/// {"system_text","user_text"} and takes the response body as the story.
class HttpTextProvider final : public TextProvider {
public:
    HttpTextProvider(ProviderSettings settings, std::string api_key);

    [[nodiscard]] std::string name() const override;
    Result<std::string> generate(const PromptSpec& prompt) override;

private:
    ProviderSettings settings_;
    std::string api_key_;
};

/// GitHub-style REST host: GET /user, POST /user/repos,
/// GET/PUT /repos/{owner}/{repo}/contents/{path}.
class GitHubRepoHost final : public RepoHostClient {
public:
    GitHubRepoHost(RepoHostSettings settings, std::string token);

    Result<std::string> ensure_repository(const std::string& name, bool private_repo) override;
    Result<void> write_file(const std::string& repo, const std::string& path,
                            const std::string& content) override;

private:
    Result<std::string> owner();

    RepoHostSettings settings_;
    std::string token_;
    std::string owner_;
};

std::string base64_encode(std::string_view data);

} // namespace learnstory
