#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <variant>

namespace learnstory {

/// Machine-readable error codes. The string form (see code_name) is what the
/// HTTP surface reports, so renaming an enumerator is a wire change.
enum class ErrorCode {
    invalid_url,
    unknown_resource,
    unknown_reflection,
    unknown_tag,
    unknown_story,
    unknown_platform,
    unknown_job,
    rating_out_of_range,
    empty_text,
    offset_on_non_video,
    invalid_offset,
    empty_name,
    self_merge,
    not_a_video,
    insufficient_resources,
    no_reflections,
    empty_input,
    provider_failure,
    parse_failure,
    empty_story,
    invalid_profile,
    no_story,
    empty_tag,
    malformed_layout,
    remote_failure,
    clock_skew,
    corrupt_store,
    io_failure,
    invalid_config,
    invalid_request,
    unauthorized,
    not_found,
    method_not_allowed,
    internal,
};

std::string_view code_name(ErrorCode code) noexcept;

struct Error {
    ErrorCode code{ErrorCode::internal};
    std::string message;

    [[nodiscard]] std::string describe() const {
        std::string out(code_name(code));
        if (!message.empty()) {
            out += ": ";
            out += message;
        }
        return out;
    }
};

inline Error make_error(ErrorCode code, std::string message = {}) {
    return Error{code, std::move(message)};
}

/// Value-or-error return type used across the library.
template <typename T>
class [[nodiscard]] Result {
public:
    Result(T value) : data_(std::move(value)) {}
    Result(Error error) : data_(std::move(error)) {}

    [[nodiscard]] bool ok() const noexcept { return data_.index() == 0; }
    explicit operator bool() const noexcept { return ok(); }

    T& value() & { return std::get<0>(data_); }
    const T& value() const& { return std::get<0>(data_); }
    T value() && { return std::get<0>(std::move(data_)); }

    T& operator*() & { return value(); }
    const T& operator*() const& { return value(); }
    /// By value, so `for (auto& x : *make_result())` does not dangle.
    T operator*() && { return std::move(*this).value(); }
    T* operator->() { return &value(); }
    const T* operator->() const { return &value(); }

    [[nodiscard]] const Error& error() const { return std::get<1>(data_); }

private:
    std::variant<T, Error> data_;
};

template <>
class [[nodiscard]] Result<void> {
public:
    Result() = default;
    Result(Error error) : error_(std::move(error)), failed_(true) {}

    [[nodiscard]] bool ok() const noexcept { return !failed_; }
    explicit operator bool() const noexcept { return ok(); }
    [[nodiscard]] const Error& error() const { return error_; }

private:
    Error error_;
    bool failed_{false};
};

} // namespace learnstory
