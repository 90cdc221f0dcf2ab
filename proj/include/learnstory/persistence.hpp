#pragma once

#include "learnstory/activity.hpp"
#include "learnstory/curation_store.hpp"
#include "learnstory/result.hpp"

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace learnstory {

/// Everything persisted for one learner.
struct LearnerData {
    std::string learner_id;
    std::string token_digest;  // hex SHA-256 of the learner token
    StoreState store;
    std::vector<ActivityEvent> events;

    bool operator==(const LearnerData&) const = default;
};

struct DataFile {
    std::vector<LearnerData> learners;

    bool operator==(const DataFile&) const = default;
};

inline constexpr int kDataFileVersion = 1;

std::string encode_data_file(const DataFile& data);

/// corrupt-store errors name the offending location: a byte offset for
/// syntax errors, a JSON pointer for bad records.
Result<DataFile> decode_data_file(std::string_view text);

/// A missing file yields an empty DataFile.
Result<DataFile> load_store(const std::filesystem::path& path);

struct PersistHooks {
    /// Runs after the temp file is written and before it replaces the target.
    /// Throwing aborts the persist as if the process died there.
    std::function<void(const std::filesystem::path& temp)> before_rename;
};

/// Writes "<path>.tmp", fsyncs it and renames it over `path`.
Result<void> persist_store(const DataFile& data, const std::filesystem::path& path,
                           const PersistHooks& hooks = {});

} // namespace learnstory
