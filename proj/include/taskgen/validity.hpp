#pragma once

#include <optional>
#include <string>
#include <vector>

#include "taskgen/petel.hpp"
#include "taskgen/schema.hpp"

namespace taskgen {

/// Operator/kind compatibility relation. Attribute-free ops (all_fil,
/// count_agg) accept no kind.
bool accepts(FilterOp op, AttributeKind kind) noexcept;
bool accepts(AggOp op, AttributeKind kind) noexcept;

/// Domain-nonsense pattern; unset fields are wildcards. A rule with every
/// field unset matches nothing.
struct BlockRule {
    std::optional<std::string> filter_attribute;
    std::optional<std::string> agg_attribute;
    std::optional<FilterOp> filter_op;
    std::optional<AggOp> agg_op;
};

/// Permits one attribute-vs-attribute filter, e.g. less_fil(A, B).
struct PairRule {
    std::string left;
    std::string right;
    FilterOp op = FilterOp::Less;
};

struct ValidityRules {
    std::vector<BlockRule> blocklist;
    std::vector<PairRule> pair_whitelist;
};

namespace reason {
inline constexpr const char* kUnknownAttribute = "unknown-attribute";
inline constexpr const char* kEntityKind = "entity-kind";
inline constexpr const char* kFilterKindMismatch = "filter-kind-mismatch";
inline constexpr const char* kAggKindMismatch = "agg-kind-mismatch";
inline constexpr const char* kFilterShape = "filter-shape";
inline constexpr const char* kAggShape = "agg-shape";
inline constexpr const char* kThresholdType = "threshold-type-mismatch";
inline constexpr const char* kFilterOnEntity = "filter-on-entity";
inline constexpr const char* kAttributePair = "attribute-pair-filter";
inline constexpr const char* kBlocklisted = "blocklisted";
} // namespace reason

struct ValidityResult {
    bool valid = false;
    double score = 0.0; // f_v, 1.0 iff valid
    std::vector<std::string> reasons;
};

ValidityResult check_validity(const Task& task, const Schema& schema,
                              const ValidityRules& rules = {});

} // namespace taskgen
