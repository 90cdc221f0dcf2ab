#include "learnstory/story_engine.hpp"

#include "learnstory/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

namespace learnstory {

namespace {

// Common English function words plus filler that shows up in study notes.
constexpr std::string_view kStopWords[] = {
    "about", "above", "after", "again", "against", "all", "also", "and", "any", "are", "aren",
    "because", "been", "before", "being", "below", "between", "both", "but", "can", "cannot",
    "could", "couldn", "did", "didn", "does", "doesn", "doing", "don", "down", "during", "each",
    "even", "ever", "every", "few", "for", "from", "further", "get", "gets", "getting", "got",
    "had", "hadn", "has", "hasn", "have", "haven", "having", "her", "here", "hers", "herself",
    "him", "himself", "his", "how", "however", "into", "isn", "it's", "its", "itself", "just",
    "let", "like", "made", "make", "many", "may", "maybe", "might", "more", "most", "much", "must",
    "myself", "need", "needs", "not", "now", "off", "once", "one", "only", "other", "our", "ours",
    "ourselves", "out", "over", "own", "really", "same", "see", "seems", "shall", "she",
    "should", "shouldn", "some", "still", "such", "than", "that", "the", "their", "theirs",
    "them", "themselves", "then", "there", "these", "they", "thing", "things", "think", "this",
    "those", "though", "through", "too", "under", "until", "upon", "use", "used", "using", "very",
    "want", "was", "wasn", "way", "well", "were", "weren", "what", "when", "where", "whether",
    "which", "while", "who", "whom", "why", "will", "with", "within", "without", "won", "would",
    "wouldn", "yet", "you", "your", "yours", "yourself", "yourselves", "i'm", "i've", "i'll",
    "i'd", "we're", "we've", "you're", "they're", "that's", "there's", "what's", "let's",
    "can't", "won't", "don't", "didn't", "doesn't", "isn't", "wasn't", "aren't",
};

bool is_stop_word(std::string_view token) {
    return std::find(std::begin(kStopWords), std::end(kStopWords), token) != std::end(kStopWords);
}

bool is_token_char(char c) {
    const auto u = static_cast<unsigned char>(c);
    return u >= 0x80 || std::isalnum(u) != 0 || c == '_' || c == '+' || c == '#' || c == '\'';
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < text.size()) {
        if (!is_token_char(text[i])) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < text.size() && is_token_char(text[j])) {
            ++j;
        }
        std::string_view raw = text.substr(i, j - i);
        // Apostrophes only count inside a word ("don't"), not as quotes.
        while (!raw.empty() && raw.front() == '\'') raw.remove_prefix(1);
        while (!raw.empty() && raw.back() == '\'') raw.remove_suffix(1);
        const bool has_alnum = std::any_of(raw.begin(), raw.end(), [](char c) {
            const auto u = static_cast<unsigned char>(c);
            return u >= 0x80 || std::isalnum(u) != 0;
        });
        if (has_alnum) {
            out.push_back(text::to_lower_ascii(raw));
        }
        i = j;
    }
    return out;
}

// Multi-line text in a list item: continuation lines indented by two spaces.
std::string indent_continuation(std::string_view text) {
    std::string out;
    for (char c : text) {
        out += c;
        if (c == '\n') {
            out += "  ";
        }
    }
    return out;
}

std::string single_line(std::string_view s) { return text::collapse_whitespace(s); }

std::vector<StoryEntry> listing_from(const StoryInput& input) {
    std::vector<StoryEntry> out;
    for (const auto& entry : input.entries) {
        for (const auto& r : entry.reflections) {
            StoryEntry e{r.text, entry.resource.url, std::nullopt};
            if (r.video_offset) {
                if (auto anchored = anchored_url(entry.resource, *r.video_offset)) {
                    e.anchored_url = *anchored;
                }
            }
            out.push_back(std::move(e));
        }
    }
    return out;
}

std::vector<std::string> reflection_texts(const StoryInput& input) {
    std::vector<std::string> out;
    for (const auto& entry : input.entries) {
        for (const auto& r : entry.reflections) {
            out.push_back(r.text);
        }
    }
    return out;
}

std::string_view rstrip(std::string_view s) {
    while (!s.empty() && text::is_space(s.back())) {
        s.remove_suffix(1);
    }
    return s;
}

} // namespace

std::span<const std::string_view> stop_words() noexcept { return kStopWords; }

std::size_t StoryInput::reflection_count() const noexcept {
    std::size_t n = 0;
    for (const auto& e : entries) {
        n += e.reflections.size();
    }
    return n;
}

Result<StoryInput> collect_story_input(const CurationStore& store, const TagId& tag_id, std::size_t min_resources) {
    const Tag* tag = store.find_tag(tag_id);
    if (tag == nullptr) {
        return make_error(ErrorCode::unknown_tag, tag_id.value);
    }
    auto resources = store.resources_by_tag(tag_id);
    if (!resources) {
        return resources.error();
    }
    if (resources->size() < min_resources) {
        return make_error(ErrorCode::insufficient_resources,
                          "tag has " + std::to_string(resources->size()) + " resources, at least " +
                              std::to_string(min_resources) + " required");
    }
    StoryInput input;
    input.tag = *tag;
    input.collected_at = store.now();
    for (auto& r : *resources) {
        StoryInputEntry entry{r, store.reflections_for(r.id)};
        input.entries.push_back(std::move(entry));
    }
    if (input.reflection_count() == 0) {
        return make_error(ErrorCode::no_reflections, "tag " + tag->name + " has no reflections yet");
    }
    return input;
}

Result<PromptSpec> build_prompt(const StoryInput& input) {
    if (input.entries.empty() || input.reflection_count() == 0) {
        return make_error(ErrorCode::empty_input, "nothing to tell a story about");
    }
    PromptSpec spec;
    spec.system_text =
        "You help a self-directed programming learner turn their own curation notes into a learning story.\n"
        "Write in the first person, as the learner (\"I ...\"), using only the resources and reflections "
        "provided. The story is learner-authored: keep their reflections in their own words.\n"
        "Do not give superficial or generic advice such as \"search Stack Overflow\", \"read the "
        "documentation\" or \"practice more\". Every piece of feedback must refer to a specific resource, "
        "question or intention from the input.\n"
        "Answer with exactly four sections, in this order, using these markers:\n"
        "# <title of the story>\n"
        "## Reflections\n"
        "<the learner's reflections, one per line, each starting with \"- \">\n"
        "## Keywords\n"
        "<comma-separated keywords for the overall reflections>\n"
        "## Feedback\n"
        "<feedback on this learning path: progress made, open questions, concrete next steps>\n";

    std::ostringstream user;
    user << "Learning path (tag): " << input.tag.name << "\n";
    user << "Resources: " << input.entries.size() << ", reflections: " << input.reflection_count() << "\n";
    std::size_t n = 0;
    for (const auto& entry : input.entries) {
        const Resource& r = entry.resource;
        user << "\nResource " << ++n << ": " << r.title << "\n";
        user << "URL: " << r.url << "\n";
        user << "Kind: " << to_string(r.kind) << "\n";
        user << "Added: " << format_iso8601(r.added_at) << "\n";
        if (r.rating) {
            user << "Rating: " << *r.rating << "/5\n";
        }
        user << "Reflections:\n";
        if (entry.reflections.empty()) {
            user << "(none)\n";
        }
        for (const auto& refl : entry.reflections) {
            user << "- [" << format_iso8601(refl.created_at) << "] (" << to_string(refl.kind);
            if (refl.video_offset) {
                user << ", video at " << format_clock_offset(*refl.video_offset);
            }
            user << ") " << refl.text << "\n";
        }
    }
    spec.user_text = user.str();
    return spec;
}

Result<Story> fallback_generate(const StoryInput& input) {
    if (input.entries.empty() || input.reflection_count() == 0) {
        return make_error(ErrorCode::empty_input, "nothing to tell a story about");
    }
    Story story;
    story.tag_id = input.tag.id;
    story.title = "Learning story: " + input.tag.name;
    story.reflection_listing = listing_from(input);
    story.keywords = extract_keywords(reflection_texts(input), kFallbackKeywordCount);
    story.created_at = input.collected_at;
    story.provider_id = std::string(kFallbackProviderId);

    std::size_t questions = 0;
    std::size_t intentions = 0;
    std::optional<Timestamp> earliest;
    std::optional<Timestamp> latest;
    for (const auto& entry : input.entries) {
        for (const auto& r : entry.reflections) {
            questions += r.kind == ReflectionKind::question ? 1 : 0;
            intentions += r.kind == ReflectionKind::intention ? 1 : 0;
            earliest = earliest ? std::min(*earliest, r.created_at) : r.created_at;
            latest = latest ? std::max(*latest, r.created_at) : r.created_at;
        }
    }
    std::ostringstream fb;
    fb << "I curated " << input.entries.size() << (input.entries.size() == 1 ? " resource" : " resources")
       << " on " << input.tag.name << " and wrote " << input.reflection_count()
       << (input.reflection_count() == 1 ? " reflection" : " reflections") << ", including " << questions
       << (questions == 1 ? " question" : " questions") << " and " << intentions
       << (intentions == 1 ? " intention" : " intentions") << ". My reflections run from "
       << format_iso8601(*earliest) << " to " << format_iso8601(*latest) << ".";
    if (questions > 0) {
        fb << " The open questions above are the next things to resolve.";
    }
    story.ai_feedback = fb.str();
    return story;
}

Result<Story> parse_provider_story(std::string_view generated, const StoryInput& input) {
    // Split into lines and find the section markers in order.
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= generated.size()) {
        auto nl = generated.find('\n', start);
        if (nl == std::string_view::npos) {
            lines.push_back(generated.substr(start));
            break;
        }
        lines.push_back(generated.substr(start, nl - start));
        start = nl + 1;
    }
    auto find_line = [&](std::size_t from, auto pred) -> std::optional<std::size_t> {
        for (std::size_t i = from; i < lines.size(); ++i) {
            if (pred(rstrip(lines[i]))) {
                return i;
            }
        }
        return std::nullopt;
    };
    auto title_at = find_line(0, [](std::string_view l) { return l.starts_with("# ") ; });
    if (!title_at) {
        return make_error(ErrorCode::parse_failure, "missing title line");
    }
    auto refl_at = find_line(*title_at + 1, [](std::string_view l) { return l == kReflectionsMarker; });
    if (!refl_at) {
        return make_error(ErrorCode::parse_failure, "missing reflections section");
    }
    auto kw_at = find_line(*refl_at + 1, [](std::string_view l) { return l == kKeywordsMarker; });
    if (!kw_at) {
        return make_error(ErrorCode::parse_failure, "missing keywords section");
    }
    auto fb_at = find_line(*kw_at + 1, [](std::string_view l) { return l == kFeedbackMarker; });
    if (!fb_at) {
        return make_error(ErrorCode::parse_failure, "missing feedback section");
    }

    Story story;
    story.tag_id = input.tag.id;
    story.title = single_line(rstrip(lines[*title_at]).substr(2));
    if (story.title.empty()) {
        return make_error(ErrorCode::parse_failure, "empty title");
    }
    story.reflection_listing = listing_from(input);

    std::set<std::string> seen;
    for (std::size_t i = *kw_at + 1; i < *fb_at; ++i) {
        std::string_view line = lines[i];
        std::size_t pos = 0;
        while (pos <= line.size()) {
            auto comma = line.find(',', pos);
            std::string_view part = line.substr(pos, comma == std::string_view::npos ? line.npos : comma - pos);
            part = text::trim(part);
            while (!part.empty() && (part.front() == '-' || part.front() == '*' || part.front() == '#')) {
                part.remove_prefix(1);
                part = text::trim(part);
            }
            std::string kw = single_line(part);
            if (!kw.empty() && seen.insert(text::to_lower_ascii(kw)).second) {
                story.keywords.push_back(std::move(kw));
            }
            if (comma == std::string_view::npos) {
                break;
            }
            pos = comma + 1;
        }
    }
    if (story.keywords.empty()) {
        story.keywords = extract_keywords(reflection_texts(input), kFallbackKeywordCount);
    }

    std::string feedback;
    for (std::size_t i = *fb_at + 1; i < lines.size(); ++i) {
        if (rstrip(lines[i]) == "```") {
            continue;  // closing fence from providers that wrap output in markdown blocks
        }
        feedback += lines[i];
        feedback += '\n';
    }
    story.ai_feedback = std::string(text::trim(feedback));
    if (story.ai_feedback.empty()) {
        return make_error(ErrorCode::parse_failure, "empty feedback section");
    }
    story.created_at = input.collected_at;
    return story;
}

Result<Story> generate_story(const StoryInput& input, TextProvider* provider, bool fallback_enabled) {
    auto prompt = build_prompt(input);
    if (!prompt) {
        return prompt.error();
    }
    Error failure = make_error(ErrorCode::provider_failure, "no text provider configured");
    if (provider != nullptr) {
        auto generated = provider->generate(*prompt);
        if (generated) {
            auto parsed = parse_provider_story(*generated, input);
            if (parsed) {
                parsed->provider_id = provider->name();
                return parsed;
            }
            failure = make_error(ErrorCode::provider_failure, "unparseable provider output: " + parsed.error().describe());
        } else {
            failure = make_error(ErrorCode::provider_failure, generated.error().describe());
        }
    }
    if (fallback_enabled) {
        return fallback_generate(input);
    }
    return failure;
}

Result<Story> generate_and_store_story(CurationStore& store, const StoryInput& input, TextProvider* provider,
                                       bool fallback_enabled) {
    auto story = generate_story(input, provider, fallback_enabled);
    if (!story) {
        return story.error();
    }
    return store.add_story(std::move(story).value());
}

std::string format_story_entry(const StoryEntry& entry) {
    std::string line = indent_continuation(entry.text);
    line += " (" + entry.resource_url + ")";
    if (entry.anchored_url) {
        line += " [jump to video](" + *entry.anchored_url + ")";
    }
    return line;
}

std::string serialize_story(const Story& story) {
    std::string out;
    out += kTitleMarker;
    out += single_line(story.title);
    out += "\n\n";
    out += kReflectionsMarker;
    out += '\n';
    for (const auto& entry : story.reflection_listing) {
        out += "- ";
        out += format_story_entry(entry);
        out += '\n';
    }
    out += '\n';
    out += kKeywordsMarker;
    out += '\n';
    for (std::size_t i = 0; i < story.keywords.size(); ++i) {
        out += i == 0 ? "" : ", ";
        out += story.keywords[i];
    }
    out += "\n\n";
    out += kFeedbackMarker;
    out += '\n';
    out += text::trim(story.ai_feedback);
    out += '\n';
    return out;
}

std::vector<std::string> extract_keywords(std::span<const std::string> texts, std::size_t k) {
    if (k == 0) {
        return {};
    }
    std::map<std::string, std::size_t> counts;
    for (const auto& t : texts) {
        for (auto& token : tokenize(t)) {
            if (text::utf8_length(token) < 3 || is_stop_word(token)) {
                continue;
            }
            ++counts[token];
        }
    }
    std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
    // std::map iteration is already lexicographic; stable sort keeps that on ties.
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    std::vector<std::string> out;
    for (std::size_t i = 0; i < ranked.size() && i < k; ++i) {
        out.push_back(ranked[i].first);
    }
    return out;
}

Result<std::vector<ThreadPost>> adapt_for_platform(const Story& story, const PlatformProfile& profile) {
    const std::string text = serialize_story(story);
    if (text::trim(text).empty()) {
        return make_error(ErrorCode::empty_story, "story has no text");
    }
    return split_into_thread(text, profile);
}

Result<Story> latest_story(const CurationStore& store, const std::optional<TagId>& tag_id) {
    const Story* best = nullptr;
    for (const auto& [id, story] : store.state().stories) {
        if (tag_id && story.tag_id != *tag_id) {
            continue;
        }
        if (best == nullptr || std::tie(story.created_at, story.id) > std::tie(best->created_at, best->id)) {
            best = &story;
        }
    }
    if (best == nullptr) {
        return make_error(ErrorCode::no_story, tag_id ? "no story for tag " + tag_id->value : "no story yet");
    }
    return *best;
}

} // namespace learnstory
