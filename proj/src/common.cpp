#include "learnstory/ids.hpp"
#include "learnstory/result.hpp"

#include <cstdio>

namespace learnstory {

std::string_view code_name(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::invalid_url: return "invalid-url";
        case ErrorCode::unknown_resource: return "unknown-resource";
        case ErrorCode::unknown_reflection: return "unknown-reflection";
        case ErrorCode::unknown_tag: return "unknown-tag";
        case ErrorCode::unknown_story: return "unknown-story";
        case ErrorCode::unknown_platform: return "unknown-platform";
        case ErrorCode::unknown_job: return "unknown-job";
        case ErrorCode::rating_out_of_range: return "rating-out-of-range";
        case ErrorCode::empty_text: return "empty-text";
        case ErrorCode::offset_on_non_video: return "offset-on-non-video";
        case ErrorCode::invalid_offset: return "invalid-offset";
        case ErrorCode::empty_name: return "empty-name";
        case ErrorCode::self_merge: return "self-merge";
        case ErrorCode::not_a_video: return "not-a-video";
        case ErrorCode::insufficient_resources: return "insufficient-resources";
        case ErrorCode::no_reflections: return "no-reflections";
        case ErrorCode::empty_input: return "empty-input";
        case ErrorCode::provider_failure: return "provider-failure";
        case ErrorCode::parse_failure: return "parse-failure";
        case ErrorCode::empty_story: return "empty-story";
        case ErrorCode::invalid_profile: return "invalid-profile";
        case ErrorCode::no_story: return "no-story";
        case ErrorCode::empty_tag: return "empty-tag";
        case ErrorCode::malformed_layout: return "malformed-layout";
        case ErrorCode::remote_failure: return "remote-failure";
        case ErrorCode::clock_skew: return "clock-skew";
        case ErrorCode::corrupt_store: return "corrupt-store";
        case ErrorCode::io_failure: return "io-failure";
        case ErrorCode::invalid_config: return "invalid-config";
        case ErrorCode::invalid_request: return "invalid-request";
        case ErrorCode::unauthorized: return "unauthorized";
        case ErrorCode::not_found: return "not-found";
        case ErrorCode::method_not_allowed: return "method-not-allowed";
        case ErrorCode::internal: return "internal";
    }
    return "internal";
}

std::string format_sequential_id(std::string_view prefix, std::uint64_t n) {
    char digits[32];
    std::snprintf(digits, sizeof digits, "%06llu", static_cast<unsigned long long>(n));
    std::string out(prefix);
    out += '-';
    out += digits;
    return out;
}

} // namespace learnstory
