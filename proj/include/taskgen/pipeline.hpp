#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "taskgen/dataset.hpp"
#include "taskgen/enumeration.hpp"
#include "taskgen/evaluation.hpp"
#include "taskgen/labeling.hpp"
#include "taskgen/metric_store.hpp"
#include "taskgen/ranking_model.hpp"
#include "taskgen/recommender.hpp"
#include "taskgen/validity.hpp"

namespace taskgen {

struct PipelineConfig {
    OpConfig ops;
    ValidityRules rules;
    SufficiencyThresholds sufficiency;
    PromiseWeights promise_weights;
    UtilityWeights utility_weights;
    BusinessWeights business_weights;
    std::size_t m = 20;
    std::size_t k = 5;
    double lambda = 0.7;
    std::uint64_t seed = 42;
    EvaluationOptions evaluation; // seed is derived per task from `seed`
    bool parallel = true;         // false evaluates tasks one after another
    // Called before each evaluation; an exception marks only that task failed.
    std::function<void(const Task&)> before_evaluate;

    /// Throws std::invalid_argument unless M >= K >= 1 and weights are sane.
    void validate() const;
};

/// Config fields accepted by the HTTP API and CLI:
/// {m, k, lambda, seed, window, lead, history, timing, business_weights}
PipelineConfig config_from_json(const nlohmann::json& doc, PipelineConfig base = {});

struct EvaluatedTask {
    Task task;
    TaskId id = 0;
    TaskFeatures features;
    double business = 0;
    PromiseScore promise;
    SufficiencyReport sufficiency;
    Evaluation evaluation;
};

struct PipelineResult {
    std::size_t universe_size = 0;    // N
    std::size_t valid_count = 0;
    std::size_t families_selected = 0; // M unresolved families
    std::size_t candidates = 0;        // concrete tasks after instantiation
    std::size_t evaluated_count = 0;   // M concrete tasks (or fewer)
    std::size_t failed_count = 0;
    std::vector<EvaluatedTask> evaluated; // id ascending
    std::vector<Recommendation> recommendations;
};

/// enumerate -> validity -> promise -> top-M families -> thresholds ->
/// training sets -> sufficiency -> top-M concrete -> evaluate -> utility ->
/// static rank -> diversity re-rank. Appends every task's record to `store`.
PipelineResult run_pipeline(const Dataset& dataset, const PipelineConfig& config,
                            const RankingModel& model, MetricStore& store,
                            std::string_view session_id);

/// Utility under `model`, static ranking of all evaluated tasks, then MMR
/// down to K.
std::vector<Recommendation> recommend(const std::vector<EvaluatedTask>& evaluated,
                                      const Schema& schema, const RankingModel& model,
                                      const UtilityWeights& weights, std::size_t k, double lambda);

nlohmann::json recommendations_json(const std::vector<Recommendation>& recs);

} // namespace taskgen
