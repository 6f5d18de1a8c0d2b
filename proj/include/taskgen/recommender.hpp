#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "taskgen/evaluation.hpp"
#include "taskgen/labeling.hpp"
#include "taskgen/petel.hpp"
#include "taskgen/ranking_model.hpp"
#include "taskgen/schema.hpp"
#include "taskgen/validity.hpp"

namespace taskgen {

// ---------------------------------------------------------------------------
// Promise (pre-evaluation screening)

struct PromiseWeights {
    double preference = 0.5; // w_p
    double business = 0.25;  // w_b
    double examples = 0.25;  // w_e
};

struct PromiseScore {
    double validity = 0;   // f_v
    double preference = 0; // f_p
    double business = 0;   // f_b
    double examples = 0;   // f_e
    double promise = 0;    // F_promise

    bool operator==(const PromiseScore&) const = default;
};

using BusinessWeights = std::map<std::string, double>;
inline constexpr double kDefaultBusinessWeight = 0.5;

/// Mean importance over the attributes the task references (entity, filter
/// attribute(s), aggregated attribute); unlisted attributes weigh 0.5.
double business_value(const Task& task, const BusinessWeights& weights);

PromiseScore score_promise(const Task& task, const ValidityResult& validity, const TaskFeatures& features,
                           const RankingModel& model, const BusinessWeights& business_weights,
                           const SufficiencyReport& sufficiency, const PromiseWeights& weights = {});

struct ScoredTask {
    Task task;
    TaskId id = 0;
    PromiseScore score;
};

/// Top-M valid tasks by F_promise, ties by id ascending.
std::vector<ScoredTask> select_promising(std::vector<ScoredTask> scored, std::size_t m);

// ---------------------------------------------------------------------------
// Utility (post-evaluation ranking)

struct UtilityInputs {
    double preference = 0;     // f_p
    double business = 0;       // f_b
    double examples = 0;       // f_e
    double accuracy = 0;       // f'_a
    double time_score = 0;     // 1 / (1 + f'_tau)
    double confidence = 0;     // f'_c
    double explainability = 0; // f'_x

    bool operator==(const UtilityInputs&) const = default;
};

struct UtilityWeights {
    double preference = 0.20;
    double business = 0.10;
    double examples = 0.10;
    double accuracy = 0.35;
    double time_score = 0.05;
    double confidence = 0.10;
    double explainability = 0.10;

    /// Throws std::invalid_argument unless non-negative and summing to 1.
    void validate() const;
};

double utility(const UtilityInputs& inputs, const UtilityWeights& weights);

/// f_p from the model, metrics from the feature slots. Throws MissingMetrics.
UtilityInputs utility_inputs(const TaskFeatures& features, const RankingModel& model, double business);
double score_utility(const TaskFeatures& features, const UtilityWeights& weights,
                     const RankingModel& model, double business);

struct Recommendation {
    Task task;
    TaskId id = 0;
    std::string petel;
    std::string nl;
    double utility = 0;
    UtilityInputs components;
};

/// Top-K by utility descending, ties by id ascending.
std::vector<Recommendation> rank_static(std::vector<Recommendation> candidates, std::size_t k);

// ---------------------------------------------------------------------------
// Diversity

/// 1 - Jaccard similarity of {entity, filter op, filter attr(s), agg op,
/// agg attr}; absent slots are omitted. Thresholds do not participate.
double diversity(const Task& a, const Task& b);

/// Greedy maximal marginal relevance over a utility-sorted list. The first
/// pick is the utility argmax; ties go to the earlier list position.
std::vector<Recommendation> rerank_diverse(const std::vector<Recommendation>& ranked, double lambda,
                                           std::size_t k);

nlohmann::json to_json(const Recommendation& rec);
nlohmann::json to_json(const PromiseScore& score);
nlohmann::json to_json(const TaskMetrics& metrics);

} // namespace taskgen
