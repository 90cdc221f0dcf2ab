#include "learnstory/exporter.hpp"

#include "learnstory/story_engine.hpp"
#include "learnstory/text.hpp"
#include "learnstory/url.hpp"

#include <charconv>
#include <set>
#include <sstream>

namespace learnstory {

namespace {

constexpr std::string_view kEntrySeparator = " — ";
constexpr std::string_view kAnchorOpen = " [▶ ";
constexpr std::string_view kLinkPrefix = "Link: ";
constexpr std::string_view kAddedPrefix = "Added: ";
constexpr std::string_view kRatingPrefix = "Rating: ";
constexpr std::string_view kResourceReflections = "## Reflections";
constexpr std::size_t kIsoLength = 20;

std::string render_anchor(const std::string& url, std::int64_t offset) {
    return std::string(kAnchorOpen) + format_clock_offset(offset) + "](" + append_time_parameter(url, offset) + ")";
}

std::vector<std::string_view> split_lines(std::string_view s) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start < s.size()) {
        auto nl = s.find('\n', start);
        if (nl == std::string_view::npos) {
            lines.push_back(s.substr(start));
            break;
        }
        lines.push_back(s.substr(start, nl - start));
        start = nl + 1;
    }
    return lines;
}

Error malformed(const std::string& path, const std::string& what) {
    return make_error(ErrorCode::malformed_layout, path + ": " + what);
}

// Strips a trailing anchor link from an entry when it is exactly the one
// render_anchor would produce for this URL.
std::optional<std::int64_t> take_anchor(std::string& entry, const std::string& url) {
    const auto pos = entry.rfind(kAnchorOpen);
    if (pos == std::string::npos || entry.back() != ')') {
        return std::nullopt;
    }
    const std::string suffix = entry.substr(pos);
    const auto link_at = suffix.find("](");
    if (link_at == std::string::npos) {
        return std::nullopt;
    }
    const std::string link = suffix.substr(link_at + 2, suffix.size() - link_at - 3);
    std::int64_t offset = 0;
    if (link != url) {
        const auto t = link.rfind("t=");
        if (t == std::string::npos) {
            return std::nullopt;
        }
        const char* first = link.data() + t + 2;
        const char* last = link.data() + link.size();
        auto [ptr, ec] = std::from_chars(first, last, offset);
        if (ec != std::errc{} || ptr == last || *ptr != 's') {
            return std::nullopt;
        }
    }
    if (suffix != render_anchor(url, offset)) {
        return std::nullopt;
    }
    entry.erase(pos);
    return offset;
}

Result<ExportedResource> parse_resource_file(const std::string& path, std::string_view content) {
    const auto lines = split_lines(content);
    std::size_t i = 0;
    if (lines.empty() || !lines[0].starts_with("# ")) {
        return malformed(path, "missing heading");
    }
    ExportedResource r;
    r.title = std::string(lines[0].substr(2));
    i = 1;
    while (i < lines.size() && lines[i].empty()) ++i;
    if (i >= lines.size() || !lines[i].starts_with(kLinkPrefix)) {
        return malformed(path, "missing link line");
    }
    r.url = std::string(lines[i].substr(kLinkPrefix.size()));
    ++i;
    if (i >= lines.size() || !lines[i].starts_with(kAddedPrefix)) {
        return malformed(path, "missing added line");
    }
    auto added = parse_iso8601(lines[i].substr(kAddedPrefix.size()));
    if (!added) {
        return malformed(path, "bad added timestamp");
    }
    r.added_at = *added;
    ++i;
    if (i < lines.size() && lines[i].starts_with(kRatingPrefix)) {
        std::string_view v = lines[i].substr(kRatingPrefix.size());
        int rating = 0;
        auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), rating);
        if (ec != std::errc{} || std::string_view(ptr, v.data() + v.size() - ptr) != "/5") {
            return malformed(path, "bad rating line");
        }
        r.rating = rating;
        ++i;
    }
    while (i < lines.size() && lines[i].empty()) ++i;
    if (i == lines.size()) {
        return r;
    }
    if (lines[i] != kResourceReflections) {
        return malformed(path, "missing reflections section");
    }
    ++i;

    std::optional<std::string> pending;
    auto flush = [&]() -> Result<void> {
        if (!pending) {
            return {};
        }
        std::string& entry = *pending;
        if (entry.size() < kIsoLength + kEntrySeparator.size() ||
            std::string_view(entry).substr(kIsoLength, kEntrySeparator.size()) != kEntrySeparator) {
            return malformed(path, "reflection line without timestamp separator");
        }
        auto ts = parse_iso8601(std::string_view(entry).substr(0, kIsoLength));
        if (!ts) {
            return malformed(path, "bad reflection timestamp");
        }
        std::string body = entry.substr(kIsoLength + kEntrySeparator.size());
        ExportedReflection refl;
        refl.created_at = *ts;
        refl.video_offset = take_anchor(body, r.url);
        refl.text = std::move(body);
        r.reflections.push_back(std::move(refl));
        pending.reset();
        return {};
    };
    for (; i < lines.size(); ++i) {
        const auto line = lines[i];
        if (line.starts_with("- ")) {
            if (auto f = flush(); !f) return f.error();
            pending = std::string(line.substr(2));
        } else if (line.starts_with("  ") && pending) {
            *pending += '\n';
            *pending += line.substr(2);
        } else if (line.empty()) {
            continue;
        } else {
            return malformed(path, "unexpected line in reflections: " + std::string(line));
        }
    }
    if (auto f = flush(); !f) return f.error();
    return r;
}

} // namespace

const std::string* RepoLayout::find(std::string_view path) const {
    for (const auto& [p, content] : files) {
        if (p == path) {
            return &content;
        }
    }
    return nullptr;
}

std::string render_resource_file(const Resource& resource, const std::vector<Reflection>& reflections) {
    std::ostringstream out;
    out << "# " << resource.title << "\n\n";
    out << kLinkPrefix << resource.url << "\n";
    out << kAddedPrefix << format_iso8601(resource.added_at) << "\n";
    if (resource.rating) {
        out << kRatingPrefix << *resource.rating << "/5\n";
    }
    if (reflections.empty()) {
        return out.str();
    }
    out << "\n" << kResourceReflections << "\n\n";
    for (const auto& r : reflections) {
        out << "- " << format_iso8601(r.created_at) << kEntrySeparator;
        for (char c : r.text) {
            out << c;
            if (c == '\n') {
                out << "  ";
            }
        }
        if (r.video_offset && resource.kind == ResourceKind::video) {
            out << render_anchor(resource.url, *r.video_offset);
        }
        out << "\n";
    }
    return out.str();
}

std::string render_in_progress_readme(const Tag& tag, const std::vector<Resource>& resources) {
    std::vector<Timestamp> times;
    for (const auto& r : resources) {
        times.push_back(r.added_at);
    }
    std::sort(times.begin(), times.end());
    std::ostringstream out;
    out << "# " << tag.name << "\n\n";
    out << "> " << kInProgressMarker << ": " << resources.size()
        << (resources.size() == 1 ? " resource" : " resources") << " curated so far, no story yet.\n\n";
    out << "## Resources added\n\n";
    for (auto t : times) {
        out << "- " << format_iso8601(t) << "\n";
    }
    return out.str();
}

Result<RepoLayout> build_repo_layout(const CurationStore& store, const TagId& tag_id, const std::optional<Story>& story) {
    const Tag* tag = store.find_tag(tag_id);
    if (tag == nullptr) {
        return make_error(ErrorCode::unknown_tag, tag_id.value);
    }
    auto resources = store.resources_by_tag(tag_id);
    if (!resources) {
        return resources.error();
    }
    if (resources->empty()) {
        return make_error(ErrorCode::empty_tag, "tag " + tag->name + " has no resources");
    }
    RepoLayout layout;
    layout.repo_name = tag->name;
    layout.files.emplace_back(std::string(kReadmePath),
                              story ? serialize_story(*story) : render_in_progress_readme(*tag, *resources));

    std::set<std::string> taken{"readme"};
    for (const auto& r : *resources) {
        std::string base = text::slugify(r.title);
        if (base.empty()) {
            base = "resource";
        }
        std::string slug = base;
        for (int n = 2; taken.contains(slug); ++n) {
            slug = base + "-" + std::to_string(n);
        }
        taken.insert(slug);
        layout.files.emplace_back(slug + ".md", render_resource_file(r, store.reflections_for(r.id)));
    }
    return layout;
}

Result<ExportedContent> parse_repo_layout(const RepoLayout& layout) {
    const std::string* readme = layout.find(kReadmePath);
    if (readme == nullptr) {
        return malformed(std::string(kReadmePath), "missing");
    }
    ExportedContent out;
    out.repo_name = layout.repo_name;
    const auto readme_lines = split_lines(*readme);
    const bool in_progress = readme_lines.size() >= 3 && readme_lines[2].starts_with("> " + std::string(kInProgressMarker));
    if (!in_progress) {
        const auto refl = readme->find("\n" + std::string(kReflectionsMarker) + "\n");
        const auto kw = readme->find("\n" + std::string(kKeywordsMarker) + "\n");
        const auto fb = readme->find("\n" + std::string(kFeedbackMarker) + "\n");
        if (!readme->starts_with(kTitleMarker) || refl == std::string::npos || kw == std::string::npos ||
            fb == std::string::npos || !(refl < kw && kw < fb)) {
            return malformed(std::string(kReadmePath), "neither a story nor an in-progress note");
        }
        out.story_text = *readme;
    }
    for (const auto& [path, content] : layout.files) {
        if (path == kReadmePath) {
            continue;
        }
        if (!path.ends_with(".md")) {
            return malformed(path, "not a markdown file");
        }
        auto r = parse_resource_file(path, content);
        if (!r) {
            return r.error();
        }
        out.resources.push_back(std::move(r).value());
    }
    return out;
}

Result<ExportedContent> export_content(const CurationStore& store, const TagId& tag_id, const std::optional<Story>& story) {
    const Tag* tag = store.find_tag(tag_id);
    if (tag == nullptr) {
        return make_error(ErrorCode::unknown_tag, tag_id.value);
    }
    ExportedContent out;
    out.repo_name = tag->name;
    if (story) {
        out.story_text = serialize_story(*story);
    }
    for (const auto& r : *store.resources_by_tag(tag_id)) {
        ExportedResource er{r.title, r.url, r.added_at, r.rating, {}};
        for (const auto& refl : store.reflections_for(r.id)) {
            er.reflections.push_back(ExportedReflection{refl.created_at, refl.text, refl.video_offset});
        }
        out.resources.push_back(std::move(er));
    }
    return out;
}

Result<RemotePushReceipt> push_repository(const RepoLayout& layout, RepoHostClient& remote, bool private_repo,
                                          const Clock& clock) {
    auto url = remote.ensure_repository(layout.repo_name, private_repo);
    if (!url) {
        return make_error(ErrorCode::remote_failure, "ensure-repository " + layout.repo_name + ": " + url.error().describe());
    }
    for (const auto& [path, content] : layout.files) {
        if (auto written = remote.write_file(layout.repo_name, path, content); !written) {
            return make_error(ErrorCode::remote_failure, "write-file " + path + ": " + written.error().describe());
        }
    }
    return RemotePushReceipt{*url, layout.files.size(), clock()};
}

Result<std::string> InMemoryRepoHost::ensure_repository(const std::string& name, bool private_repo) {
    if (repo(name) == nullptr) {
        repos_.emplace_back(name, Repo{private_repo, {}});
    }
    return "memory://" + name;
}

Result<void> InMemoryRepoHost::write_file(const std::string& name, const std::string& path, const std::string& content) {
    ++writes_;
    if (fail_at_ != 0 && writes_ == fail_at_) {
        return make_error(ErrorCode::remote_failure, "injected write failure");
    }
    for (auto& [n, r] : repos_) {
        if (n != name) {
            continue;
        }
        for (auto& [p, c] : r.files) {
            if (p == path) {
                c = content;
                return {};
            }
        }
        r.files.emplace_back(path, content);
        return {};
    }
    return make_error(ErrorCode::remote_failure, "no repository " + name);
}

const InMemoryRepoHost::Repo* InMemoryRepoHost::repo(const std::string& name) const {
    for (const auto& [n, r] : repos_) {
        if (n == name) {
            return &r;
        }
    }
    return nullptr;
}

} // namespace learnstory
