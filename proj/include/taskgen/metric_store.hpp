#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "taskgen/evaluation.hpp"
#include "taskgen/petel.hpp"
#include "taskgen/recommender.hpp"

namespace taskgen {

namespace status {
inline constexpr const char* kInvalid = "invalid";     // f_v = 0
inline constexpr const char* kScreened = "screened";   // promise scored, not selected
inline constexpr const char* kSelected = "selected";   // family among the top M
inline constexpr const char* kCandidate = "candidate"; // concrete task, not evaluated
inline constexpr const char* kEvaluated = "evaluated";
inline constexpr const char* kFailed = "failed";
} // namespace status

struct MetricRecord {
    std::string session;
    TaskId task_id = 0;
    std::string petel;
    std::string status;
    std::optional<PromiseScore> promise;
    std::optional<TaskMetrics> metrics;
    std::optional<std::string> error;
    // Logical clock; a higher revision supersedes a lower one.
    std::uint64_t revision = 0;

    bool operator==(const MetricRecord&) const = default;
};

nlohmann::json to_json(const MetricRecord& record);
/// Throws nlohmann::json exceptions or std::invalid_argument on bad shape.
MetricRecord record_from_json(const nlohmann::json& doc);

/// Append-only log of task records with a latest-record-wins view.
class MetricStore {
public:
    /// Stamps the next revision and appends.
    const MetricRecord& append(MetricRecord record);
    /// Appends with the record's own revision (used by load).
    void restore(MetricRecord record);

    const std::vector<MetricRecord>& log() const noexcept { return log_; }
    std::size_t size() const noexcept { return log_.size(); }

    /// Latest record per (session, task id), sorted by that key.
    std::vector<MetricRecord> view() const;
    std::optional<MetricRecord> latest(std::string_view session, TaskId id) const;

private:
    std::vector<MetricRecord> log_;
    std::uint64_t next_revision_ = 1;
};

std::string serialize_store(const MetricStore& store);
/// Writes the whole log as JSONL, replacing the file.
void persist_store(const MetricStore& store, const std::filesystem::path& path);

struct StoreLoad {
    MetricStore store;
    std::vector<std::string> warnings; // one per skipped corrupt line
};

StoreLoad parse_store(std::string_view jsonl);
StoreLoad load_store(const std::filesystem::path& path);

} // namespace taskgen
