#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "taskgen/labeling.hpp"
#include "taskgen/models.hpp"

namespace taskgen {

/// Post-evaluation metrics. `seconds` is raw; every other field is in [0, 1].
struct TaskMetrics {
    double accuracy = 0;       // f'_a
    double seconds = 0;        // f'_tau
    double confidence = 0;     // f'_c
    double explainability = 0; // f'_x

    bool operator==(const TaskMetrics&) const = default;
};

enum class TimingMode {
    Modeled,  // deterministic operation-count estimate
    Measured, // steady_clock wall time of fit + predict
};

struct EvaluationOptions {
    std::vector<ModelKind> kinds{ModelKind::ConstantBaseline, ModelKind::RidgeLinear,
                                 ModelKind::NearestCentroid};
    std::uint64_t seed = 0;
    std::size_t bootstrap_resamples = 200;
    double ci_level = 0.9;
    double train_fraction = 0.7;
    std::size_t min_split = 10; // below this, leave-one-out
    TimingMode timing = TimingMode::Modeled;
};

struct EvaluationDiagnostics {
    ModelKind best_kind = ModelKind::ConstantBaseline;
    double raw_score = 0; // accuracy, or unclamped R^2
    bool leave_one_out = false;
    std::size_t n_train = 0;
    std::size_t n_test = 0;
    double ci_low = 0;
    double ci_high = 0;
};

struct Evaluation {
    TaskMetrics metrics;
    EvaluationDiagnostics diagnostics;
};

/// Accuracy for categorical labels; 1 - SSres/SStot for numeric (1 when both
/// sums vanish, 0 when only SStot does).
double raw_score(std::span<const Label> truth, std::span<const Label> predicted, LabelType type);
inline double clamp01(double v) noexcept { return v < 0 ? 0 : (v > 1 ? 1 : v); }

struct Interval {
    double low = 0;
    double high = 0;
    double width() const noexcept { return high - low; }
};

/// Percentile bootstrap of the clamped score. Resample b draws from its own
/// stream seeded by (seed, b), so the result does not depend on thread count.
Interval bootstrap_interval(std::span<const Label> truth, std::span<const Label> predicted,
                            LabelType type, std::size_t resamples, double level, std::uint64_t seed);
Interval bootstrap_interval_serial(std::span<const Label> truth, std::span<const Label> predicted,
                                   LabelType type, std::size_t resamples, double level,
                                   std::uint64_t seed);

/// Time-ordered train/test split of `ts`, best compatible kind by test score.
/// Throws EmptyTrainingSet.
Evaluation evaluate_task(const Task& task, const TrainingSet& ts, const Dataset& dataset,
                         const EvaluationOptions& options);

/// SplitMix64 finaliser; derives independent sub-seeds.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) noexcept;

} // namespace taskgen
