#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>

namespace learnstory {

/// String identifier tagged by what it names, so a TagId cannot be passed
/// where a ResourceId is expected. Values are URL- and filename-safe.
template <typename Kind>
struct Id {
    std::string value;

    Id() = default;
    explicit Id(std::string v) : value(std::move(v)) {}

    [[nodiscard]] bool empty() const noexcept { return value.empty(); }
    [[nodiscard]] const std::string& str() const noexcept { return value; }

    auto operator<=>(const Id&) const = default;
};

struct ResourceKind_ {};
struct ReflectionKind_ {};
struct TagKind_ {};
struct StoryKind_ {};

using ResourceId = Id<ResourceKind_>;
using ReflectionId = Id<ReflectionKind_>;
using TagId = Id<TagKind_>;
using StoryId = Id<StoryKind_>;

/// "<prefix>-<zero padded counter>"; padding keeps lexicographic order equal
/// to creation order.
std::string format_sequential_id(std::string_view prefix, std::uint64_t n);

} // namespace learnstory

template <typename Kind>
struct std::hash<learnstory::Id<Kind>> {
    std::size_t operator()(const learnstory::Id<Kind>& id) const noexcept {
        return std::hash<std::string>{}(id.value);
    }
};
