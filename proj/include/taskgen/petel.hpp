#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "taskgen/schema.hpp"

namespace taskgen {

enum class FilterOp : std::uint8_t { All, Greater, Less, Eq, Neq };
enum class AggOp : std::uint8_t { Count, Sum, Avg, Min, Max, Majority };

inline constexpr FilterOp kAllFilterOps[] = {FilterOp::All, FilterOp::Greater, FilterOp::Less,
                                             FilterOp::Eq, FilterOp::Neq};
inline constexpr AggOp kAllAggOps[] = {AggOp::Count, AggOp::Sum, AggOp::Avg,
                                       AggOp::Min, AggOp::Max, AggOp::Majority};

/// Canonical spellings: all_fil, greater_fil, ..., count_agg, ...
std::string_view op_name(FilterOp op);
std::string_view op_name(AggOp op);

/// Accepts the canonical spellings and the long "_filter" aliases.
std::optional<FilterOp> filter_op_from_name(std::string_view name);
std::optional<AggOp> agg_op_from_name(std::string_view name);

/// Filter threshold constant: number for greater/less, category literal for eq/neq.
using Literal = std::variant<double, std::string>;

struct FilterExpr {
    FilterOp op = FilterOp::All;
    std::optional<std::string> attribute;
    // Set only for attribute-vs-attribute comparisons, e.g.
    // less_fil(<ARRIVAL_TIME>, <DEPARTURE_TIME>).
    std::optional<std::string> other_attribute;
    std::optional<Literal> threshold; // absent renders as "__"

    bool needs_threshold() const noexcept {
        return op != FilterOp::All && !other_attribute.has_value();
    }
    bool operator==(const FilterExpr&) const = default;
};

struct AggExpr {
    AggOp op = AggOp::Count;
    std::optional<std::string> attribute; // absent iff count_agg

    bool operator==(const AggExpr&) const = default;
};

struct SearchParams {
    std::chrono::seconds window{std::chrono::days{1}};
    std::chrono::seconds lead{0};
    std::chrono::seconds history{std::chrono::days{7}};

    bool operator==(const SearchParams&) const = default;
};

/// Throws std::invalid_argument unless window > 0, lead >= 0, history > 0.
void check_params(const SearchParams& params);

/// "1d", "36h", "90m". Throws std::invalid_argument on anything else.
std::chrono::seconds parse_duration(std::string_view text);
/// Largest unit that divides evenly. Throws for non-minute multiples.
std::string format_duration(std::chrono::seconds d);

struct Task {
    std::string entity;
    FilterExpr filter;
    AggExpr agg;
    SearchParams params;

    bool operator==(const Task&) const = default;
};

using TaskId = std::uint64_t;

/// FNV-1a over the canonical PeTEL text.
TaskId task_id(const Task& task);
std::string format_task_id(TaskId id);
std::optional<TaskId> parse_task_id(std::string_view text);

/// Parses the keyword block form
///   Entity: AIRLINE
///   Filter: NONE
///   Aggregator: max_agg(<ARRIVAL_DELAY>)
///   [Params: window=1d,lead=0d,history=7d]
/// Sections may also be separated by ", " on one line. Missing Params attach
/// the defaults. Attribute names are upper-cased.
Task parse_petel(std::string_view text);

/// Canonical form: short operator spellings, one section per line, Params
/// line omitted when equal to the defaults.
std::string render_petel(const Task& task);

std::string render_literal(const Literal& literal);

/// "For each <ENTITY> predict ..." template rendering. Throws InvalidTask if
/// the task fails check_validity under the default rules.
std::string render_nl(const Task& task, const Schema& schema);

} // namespace taskgen
