#pragma once
// Independent reference implementations used by the unit and acceptance
// tests. They deliberately share no code paths with the library beyond the
// data types.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "taskgen/dataset.hpp"
#include "taskgen/enumeration.hpp"
#include "taskgen/labeling.hpp"

namespace oracle {

// (entity, filter op, filter attr, agg op, agg attr); "" for absent
using TaskKey = std::tuple<std::string, int, std::string, int, std::string>;

TaskKey key_of(const taskgen::Task& t);

/// Exhaustive entity x filter op x attr x agg op x attr loop filtered only by
/// the operator typing table.
std::vector<TaskKey> brute_force_tasks(const taskgen::Schema& schema, const taskgen::OpConfig& config);

/// Typing table written out by hand, used to audit generated tasks.
bool filter_allows(taskgen::FilterOp op, taskgen::AttributeKind kind);
bool agg_allows(taskgen::AggOp op, taskgen::AttributeKind kind);

/// Full scan over every row; no time index, no plan.
std::optional<taskgen::Label> scan_label(const taskgen::Task& task, const taskgen::Dataset& ds,
                                         const taskgen::Cutoff& cutoff);

/// Quantile by sorting a copy: element at floor(p*n), clamped.
double sorted_quantile(std::vector<double> values, double p);

/// Random schema with 1..max_attrs non-time attributes and at least one entity.
taskgen::Schema random_schema(std::mt19937_64& rng, int max_attrs, int index);
/// Random non-empty enabled-op subsets.
taskgen::OpConfig random_ops(std::mt19937_64& rng);

/// Synthetic event table: `rows` rows over `days` days, entities E in {a,b,c},
/// categorical C in {x,y,z}, numerical X and Y, with some missing cells.
taskgen::Dataset synthetic_dataset(std::size_t rows, int days, std::uint64_t seed);

} // namespace oracle
