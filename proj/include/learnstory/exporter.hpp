#pragma once

#include "learnstory/curation_store.hpp"
#include "learnstory/result.hpp"
#include "learnstory/time.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace learnstory {

inline constexpr std::string_view kReadmePath = "README.md";
inline constexpr std::string_view kInProgressMarker = "Learning in progress";

/// Files to publish for one tag. The repository is named after the tag.
struct RepoLayout {
    std::string repo_name;
    std::vector<std::pair<std::string, std::string>> files;  // path -> content, README first

    [[nodiscard]] const std::string* find(std::string_view path) const;
    bool operator==(const RepoLayout&) const = default;
};

struct RemotePushReceipt {
    std::string remote_url;
    std::size_t files_written{0};
    Timestamp pushed_at{};
};

/// README.md is the serialized story when one is given, otherwise an
/// in-progress note with the resource count and when each was added. Each
/// resource gets "<slug of title>.md" ("-2", "-3", ... on collision).
Result<RepoLayout> build_repo_layout(const CurationStore& store, const TagId& tag_id,
                                     const std::optional<Story>& story);

/// Heading, a link line (URL, added time, rating if any) and one list entry
/// per reflection: "<ISO-8601 UTC> — <text>", with an anchored link for
/// video reflections. Continuation lines of multi-line text are indented by
/// two spaces.
std::string render_resource_file(const Resource& resource, const std::vector<Reflection>& reflections);

std::string render_in_progress_readme(const Tag& tag, const std::vector<Resource>& resources);

struct ExportedReflection {
    Timestamp created_at{};
    std::string text;
    std::optional<std::int64_t> video_offset;

    bool operator==(const ExportedReflection&) const = default;
};

struct ExportedResource {
    std::string title;
    std::string url;
    Timestamp added_at{};
    std::optional<int> rating;
    std::vector<ExportedReflection> reflections;

    bool operator==(const ExportedResource&) const = default;
};

/// Export-relevant content of a tag, as recovered from a layout.
struct ExportedContent {
    std::string repo_name;
    std::optional<std::string> story_text;  // README when it is a story
    std::vector<ExportedResource> resources;

    bool operator==(const ExportedContent&) const = default;
};

Result<ExportedContent> parse_repo_layout(const RepoLayout& layout);

/// The same content read straight from the store, for comparison with
/// parse_repo_layout.
Result<ExportedContent> export_content(const CurationStore& store, const TagId& tag_id,
                                       const std::optional<Story>& story);

/// Remote repository host. Implementations must make write_file an upsert.
class RepoHostClient {
public:
    virtual ~RepoHostClient() = default;
    /// Creates the repository if missing; returns its URL.
    virtual Result<std::string> ensure_repository(const std::string& name, bool private_repo) = 0;
    virtual Result<void> write_file(const std::string& repo, const std::string& path,
                                    const std::string& content) = 0;
};

/// Writes every file of the layout. A receipt is returned only when all
/// writes succeeded; any failure is reported as remote-failure.
Result<RemotePushReceipt> push_repository(const RepoLayout& layout, RepoHostClient& remote,
                                          bool private_repo = true, const Clock& clock = system_clock());

/// Repository host kept in memory; used by tests and dry runs.
class InMemoryRepoHost final : public RepoHostClient {
public:
    struct Repo {
        bool private_repo{true};
        std::vector<std::pair<std::string, std::string>> files;
    };

    Result<std::string> ensure_repository(const std::string& name, bool private_repo) override;
    Result<void> write_file(const std::string& repo, const std::string& path,
                            const std::string& content) override;

    /// Makes the n-th write_file call (1-based, counted from now) fail.
    void fail_on_write(std::size_t n) { fail_at_ = writes_ + n; }

    [[nodiscard]] const Repo* repo(const std::string& name) const;
    [[nodiscard]] std::size_t write_calls() const noexcept { return writes_; }

private:
    std::vector<std::pair<std::string, Repo>> repos_;
    std::size_t writes_{0};
    std::size_t fail_at_{0};
};

} // namespace learnstory
