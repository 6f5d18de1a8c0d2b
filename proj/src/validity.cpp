#include "taskgen/validity.hpp"

#include <algorithm>

namespace taskgen {

bool accepts(FilterOp op, AttributeKind kind) noexcept {
    switch (op) {
    case FilterOp::All: return false;
    case FilterOp::Greater:
    case FilterOp::Less: return kind == AttributeKind::Numerical;
    case FilterOp::Eq:
    case FilterOp::Neq: return kind == AttributeKind::Categorical || kind == AttributeKind::Entity;
    }
    return false;
}

bool accepts(AggOp op, AttributeKind kind) noexcept {
    switch (op) {
    case AggOp::Count: return false;
    case AggOp::Sum:
    case AggOp::Avg:
    case AggOp::Min:
    case AggOp::Max: return kind == AttributeKind::Numerical;
    case AggOp::Majority: return kind == AttributeKind::Categorical || kind == AttributeKind::Entity;
    }
    return false;
}

namespace {

class Collector {
public:
    void add(const char* r) {
        if (std::find(reasons_.begin(), reasons_.end(), r) == reasons_.end()) reasons_.emplace_back(r);
    }
    std::vector<std::string> take() { return std::move(reasons_); }
    bool empty() const { return reasons_.empty(); }

private:
    std::vector<std::string> reasons_;
};

bool matches(const BlockRule& rule, const Task& t) {
    if (!rule.filter_attribute && !rule.agg_attribute && !rule.filter_op && !rule.agg_op) return false;
    auto same = [](const std::optional<std::string>& want, const std::optional<std::string>& have) {
        return !want || (have && canonical_name(*want) == *have);
    };
    return same(rule.filter_attribute, t.filter.attribute) && same(rule.agg_attribute, t.agg.attribute) &&
           (!rule.filter_op || *rule.filter_op == t.filter.op) && (!rule.agg_op || *rule.agg_op == t.agg.op);
}

} // namespace

ValidityResult check_validity(const Task& task, const Schema& schema, const ValidityRules& rules) {
    Collector why;

    // (a) existence, (c) entity kind
    const auto entity_kind = schema.kind_of(task.entity);
    if (!entity_kind) why.add(reason::kUnknownAttribute);
    else if (*entity_kind != AttributeKind::Entity) why.add(reason::kEntityKind);

    // (b) filter shape and typing
    const auto& f = task.filter;
    if (f.op == FilterOp::All) {
        if (f.attribute || f.other_attribute || f.threshold) why.add(reason::kFilterShape);
    } else if (!f.attribute) {
        why.add(reason::kFilterShape);
    } else if (f.other_attribute) {
        if (f.threshold) why.add(reason::kFilterShape);
        const auto lk = schema.kind_of(*f.attribute);
        const auto rk = schema.kind_of(*f.other_attribute);
        if (!lk || !rk) why.add(reason::kUnknownAttribute);
        const bool permitted = std::any_of(rules.pair_whitelist.begin(), rules.pair_whitelist.end(), [&](const PairRule& p) {
            return p.op == f.op && canonical_name(p.left) == *f.attribute &&
                   canonical_name(p.right) == *f.other_attribute;
        });
        if (!permitted) why.add(reason::kAttributePair);
        else if (lk && rk && *lk != *rk) why.add(reason::kFilterKindMismatch);
    } else {
        const auto fk = schema.kind_of(*f.attribute);
        if (!fk) why.add(reason::kUnknownAttribute);
        else if (!accepts(f.op, *fk)) why.add(reason::kFilterKindMismatch);
        if (f.threshold) {
            const bool numeric_op = f.op == FilterOp::Greater || f.op == FilterOp::Less;
            if (numeric_op != std::holds_alternative<double>(*f.threshold)) why.add(reason::kThresholdType);
        }
        // (d) filtering on the grouping entity is constant within a group
        if (*f.attribute == canonical_name(task.entity)) why.add(reason::kFilterOnEntity);
    }

    // (b) aggregator shape and typing
    const auto& a = task.agg;
    if (a.op == AggOp::Count) {
        if (a.attribute) why.add(reason::kAggShape);
    } else if (!a.attribute) {
        why.add(reason::kAggShape);
    } else {
        const auto ak = schema.kind_of(*a.attribute);
        if (!ak) why.add(reason::kUnknownAttribute);
        else if (!accepts(a.op, *ak)) why.add(reason::kAggKindMismatch);
    }

    // (e) user blocklist
    if (std::any_of(rules.blocklist.begin(), rules.blocklist.end(), [&](const BlockRule& r) { return matches(r, task); }))
        why.add(reason::kBlocklisted);

    ValidityResult res;
    res.valid = why.empty();
    res.score = res.valid ? 1.0 : 0.0;
    res.reasons = why.take();
    return res;
}

} // namespace taskgen
