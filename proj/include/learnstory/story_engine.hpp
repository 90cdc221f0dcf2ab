#pragma once

#include "learnstory/curation_store.hpp"
#include "learnstory/result.hpp"
#include "learnstory/thread.hpp"
#include "learnstory/time.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace learnstory {

struct StoryInputEntry {
    Resource resource;
    std::vector<Reflection> reflections;  // by created_at, then id
};

struct StoryInput {
    Tag tag;
    std::vector<StoryInputEntry> entries;  // by resource added_at, then id
    Timestamp collected_at{};

    [[nodiscard]] std::size_t reflection_count() const noexcept;
};

struct PromptSpec {
    std::string system_text;
    std::string user_text;

    bool operator==(const PromptSpec&) const = default;
};

/// Section markers of the serialized story, in order.
inline constexpr std::string_view kTitleMarker = "# ";
inline constexpr std::string_view kReflectionsMarker = "## Reflections";
inline constexpr std::string_view kKeywordsMarker = "## Keywords";
inline constexpr std::string_view kFeedbackMarker = "## Feedback";

inline constexpr std::string_view kFallbackProviderId = "fallback";
inline constexpr std::size_t kFallbackKeywordCount = 5;

/// Tokens dropped by extract_keywords (besides anything under 3 characters).
std::span<const std::string_view> stop_words() noexcept;

/// Gathers the reflections on every resource assigned to the tag.
/// Fails with insufficient-resources below `min_resources` assigned
/// resources and with no-reflections when none of them has a reflection.
Result<StoryInput> collect_story_input(const CurationStore& store, const TagId& tag_id,
                                       std::size_t min_resources = 1);

Result<PromptSpec> build_prompt(const StoryInput& input);

/// Text-generation backend: one prompt in, generated text or an error out.
class TextProvider {
public:
    virtual ~TextProvider() = default;
    [[nodiscard]] virtual std::string name() const = 0;
    virtual Result<std::string> generate(const PromptSpec& prompt) = 0;
};

/// Offline deterministic story: template title, the input's reflections in
/// order, local keywords and a counts/timespan summary as feedback.
/// created_at is the input's collected_at; id is left empty.
Result<Story> fallback_generate(const StoryInput& input);

/// Parses provider output into a story. Title, keywords and feedback come
/// from the provider; the reflection listing is rebuilt from `input` so the
/// learner's own words and links are kept verbatim. Missing section markers
/// are a parse-failure.
Result<Story> parse_provider_story(std::string_view generated, const StoryInput& input);

/// Builds the prompt, calls the provider and parses its answer. When either
/// step fails and `fallback_enabled` is set the story comes from
/// fallback_generate with provider_id "fallback"; otherwise provider-failure.
/// A null provider behaves like a failing one. Does not persist.
Result<Story> generate_story(const StoryInput& input, TextProvider* provider, bool fallback_enabled);

/// generate_story followed by committing the result into the store, which
/// makes it the tag's latest story.
Result<Story> generate_and_store_story(CurationStore& store, const StoryInput& input,
                                       TextProvider* provider, bool fallback_enabled);

/// Markdown-like text with sections in the fixed order title, reflections,
/// keywords, feedback.
std::string serialize_story(const Story& story);

/// One listing line without the leading "- ".
std::string format_story_entry(const StoryEntry& entry);

/// Top-k case-folded tokens by frequency, ties lexicographic. Tokens are
/// runs of letters, digits, '_', '+', '#', inner apostrophes and non-ASCII
/// bytes, containing at least one letter or digit; stop words and tokens
/// under 3 code points are removed.
std::vector<std::string> extract_keywords(std::span<const std::string> texts, std::size_t k);

/// Serializes the story and splits it into a numbered thread for the
/// platform. empty-story when the serialized text is blank.
Result<std::vector<ThreadPost>> adapt_for_platform(const Story& story, const PlatformProfile& profile);

/// Latest story by created_at (ties: larger id). Without a tag, across all
/// tags.
Result<Story> latest_story(const CurationStore& store, const std::optional<TagId>& tag_id = std::nullopt);

} // namespace learnstory
