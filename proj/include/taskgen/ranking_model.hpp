#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "taskgen/evaluation.hpp"
#include "taskgen/labeling.hpp"
#include "taskgen/petel.hpp"
#include "taskgen/schema.hpp"

namespace taskgen {

/// Schema-free task descriptor. Slots are attribute kinds, never names, so a
/// model trained on one dataset scores tasks of another.
///
///   [0..4]   filter op one-hot (all, greater, less, eq, neq)
///   [5..10]  agg op one-hot (count, sum, avg, min, max, majority)
///   [11..14] filter attribute kind (time, entity, categorical, numerical)
///   [15..17] agg attribute kind (entity, categorical, numerical)
///   [18]     threshold resolved
///   [19]     f_e
///   [20]     f'_a
///   [21]     f'_c
///   [22]     f'_x
///   [23]     1 / (1 + f'_tau)
///   [24]     bias, always 1
///
/// Metric slots are 0 until evaluation fills them; `has_metrics` records which.
inline constexpr std::size_t kFeatureDim = 25;
inline constexpr int kFeatureLayoutVersion = 1;

namespace slot {
inline constexpr std::size_t kFilterOp = 0;
inline constexpr std::size_t kAggOp = 5;
inline constexpr std::size_t kFilterKind = 11;
inline constexpr std::size_t kAggKind = 15;
inline constexpr std::size_t kHasThreshold = 18;
inline constexpr std::size_t kExamples = 19;
inline constexpr std::size_t kAccuracy = 20;
inline constexpr std::size_t kConfidence = 21;
inline constexpr std::size_t kExplainability = 22;
inline constexpr std::size_t kTimeScore = 23;
inline constexpr std::size_t kBias = 24;
} // namespace slot

struct TaskFeatures {
    std::array<double, kFeatureDim> values{};
    bool has_metrics = false;
};

TaskFeatures featurize_task(const Task& task, const Schema& schema,
                            const std::optional<TaskMetrics>& metrics,
                            const std::optional<SufficiencyReport>& sufficiency);

double sigmoid(double z) noexcept;

enum class Verdict { Useful, NotUseful };
std::string_view to_string(Verdict v);
std::optional<Verdict> verdict_from_string(std::string_view s);

struct FeedbackEvent {
    TaskId task_id = 0;
    Verdict verdict = Verdict::Useful;
    std::int64_t timestamp = 0;
};

/// Online logistic ranker: f_p(t) = sigmoid(w . x(t)).
class RankingModel {
public:
    static constexpr double kDefaultEta = 0.1;

    RankingModel() = default;
    explicit RankingModel(double eta);
    RankingModel(std::array<double, kFeatureDim> weights, double eta, std::size_t prior_feedback = 0);

    double eta() const noexcept { return eta_; }
    const std::array<double, kFeatureDim>& weights() const noexcept { return weights_; }
    const std::vector<FeedbackEvent>& feedback_log() const noexcept { return log_; }
    /// Events applied here plus events carried in by import.
    std::size_t feedback_count() const noexcept { return prior_feedback_ + log_.size(); }

    double logit(const TaskFeatures& features) const noexcept;
    double preference(const TaskFeatures& features) const noexcept { return sigmoid(logit(features)); }

private:
    friend RankingModel apply_feedback(RankingModel model, const TaskFeatures& features,
                                       const FeedbackEvent& event);
    std::array<double, kFeatureDim> weights_{};
    double eta_ = kDefaultEta;
    std::size_t prior_feedback_ = 0;
    std::vector<FeedbackEvent> log_;
};

/// w <- w + eta * (y - sigmoid(w . x)) * x, y = 1 for useful.
RankingModel apply_feedback(RankingModel model, const TaskFeatures& features, const FeedbackEvent& event);

/// {"version", "eta", "weights": [25], "feedback_count"}
nlohmann::json export_model(const RankingModel& model);
/// Throws VersionError, CorruptBlob.
RankingModel import_model(const nlohmann::json& blob, std::optional<double> eta_override = std::nullopt);
RankingModel import_model_text(std::string_view blob_text, std::optional<double> eta_override = std::nullopt);

} // namespace taskgen
