#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "taskgen/petel.hpp"
#include "taskgen/schema.hpp"
#include "taskgen/stats.hpp"

namespace taskgen {

struct OpConfig {
    // all_fil and count_agg are the base forms and are always emitted; the
    // remaining entries switch their operators on.
    std::vector<FilterOp> filter_ops{std::begin(kAllFilterOps), std::end(kAllFilterOps)};
    std::vector<AggOp> agg_ops{std::begin(kAllAggOps), std::end(kAllAggOps)};
    std::vector<double> threshold_quantiles{0.25, 0.5, 0.75};
    std::size_t eq_value_limit = 5;
    SearchParams params;

    bool enabled(FilterOp op) const;
    bool enabled(AggOp op) const;
    /// Throws std::invalid_argument on empty op sets or bad quantiles.
    void validate() const;
};

struct TaskUniverse {
    Schema schema;
    std::vector<Task> tasks; // thresholds unresolved
    std::vector<TaskId> ids; // parallel to tasks

    std::size_t size() const noexcept { return tasks.size(); }
};

/// Every entity x filter x aggregator combination permitted by the operator
/// typing, grouping entity excluded as filter/majority attribute. Order is
/// entity, then filter, then aggregator, each in (operator, schema position)
/// order. Entities are generated in parallel; output equals the serial order.
TaskUniverse enumerate_tasks(const Schema& schema, const OpConfig& config);
TaskUniverse enumerate_tasks_serial(const Schema& schema, const OpConfig& config);

/// Closed form of |enumerate_tasks(schema, config).tasks|.
std::uint64_t count_tasks(const Schema& schema, const OpConfig& config);

/// Resolves "__" thresholds: numeric filters get one task per configured
/// quantile, eq/neq filters one per most frequent literal. Duplicate
/// thresholds collapse. Tasks without a threshold slot pass through.
std::vector<Task> instantiate_thresholds(const Task& task, const AttributeStats& stats,
                                         const OpConfig& config);

/// One {"id", "petel"} object per line.
std::string export_universe_jsonl(const TaskUniverse& universe);

} // namespace taskgen
