#include "taskgen/enumeration.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

#include "taskgen/errors.hpp"

namespace taskgen {

bool OpConfig::enabled(FilterOp op) const {
    return op == FilterOp::All || std::find(filter_ops.begin(), filter_ops.end(), op) != filter_ops.end();
}

bool OpConfig::enabled(AggOp op) const {
    return op == AggOp::Count || std::find(agg_ops.begin(), agg_ops.end(), op) != agg_ops.end();
}

void OpConfig::validate() const {
    if (filter_ops.empty() || agg_ops.empty()) throw std::invalid_argument("operator sets must be non-empty");
    if (threshold_quantiles.empty() && (enabled(FilterOp::Greater) || enabled(FilterOp::Less)))
        throw std::invalid_argument("numeric filters need at least one threshold quantile");
    for (std::size_t i = 0; i < threshold_quantiles.size(); ++i) {
        const double q = threshold_quantiles[i];
        if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("threshold quantiles must lie in (0, 1)");
        if (i > 0 && !(q > threshold_quantiles[i - 1]))
            throw std::invalid_argument("threshold quantiles must be strictly increasing");
    }
    check_params(params);
}

namespace {

bool groupable(AttributeKind k) { return k == AttributeKind::Categorical || k == AttributeKind::Entity; }

std::vector<FilterExpr> filters_for(const Schema& schema, const OpConfig& cfg, const std::string& entity) {
    std::vector<FilterExpr> out{FilterExpr{}};
    for (FilterOp op : {FilterOp::Greater, FilterOp::Less}) {
        if (!cfg.enabled(op)) continue;
        for (const auto& a : schema.attributes())
            if (a.kind == AttributeKind::Numerical) out.push_back({op, a.name, std::nullopt, std::nullopt});
    }
    for (FilterOp op : {FilterOp::Eq, FilterOp::Neq}) {
        if (!cfg.enabled(op)) continue;
        for (const auto& a : schema.attributes())
            if (groupable(a.kind) && a.name != entity) out.push_back({op, a.name, std::nullopt, std::nullopt});
    }
    return out;
}

std::vector<AggExpr> aggs_for(const Schema& schema, const OpConfig& cfg, const std::string& entity) {
    std::vector<AggExpr> out{AggExpr{}};
    for (AggOp op : {AggOp::Sum, AggOp::Avg, AggOp::Min, AggOp::Max}) {
        if (!cfg.enabled(op)) continue;
        for (const auto& a : schema.attributes())
            if (a.kind == AttributeKind::Numerical) out.push_back({op, a.name});
    }
    if (cfg.enabled(AggOp::Majority))
        for (const auto& a : schema.attributes())
            if (groupable(a.kind) && a.name != entity) out.push_back({AggOp::Majority, a.name});
    return out;
}

std::vector<Task> tasks_for_entity(const Schema& schema, const OpConfig& cfg, const std::string& entity) {
    const auto filters = filters_for(schema, cfg, entity);
    const auto aggs = aggs_for(schema, cfg, entity);
    std::vector<Task> out;
    out.reserve(filters.size() * aggs.size());
    for (const auto& f : filters)
        for (const auto& a : aggs) out.push_back(Task{entity, f, a, cfg.params});
    return out;
}

TaskUniverse assemble(const Schema& schema, std::vector<std::vector<Task>>& per_entity, bool parallel) {
    TaskUniverse u;
    u.schema = schema;
    std::size_t total = 0;
    for (const auto& v : per_entity) total += v.size();
    u.tasks.reserve(total);
    for (auto& v : per_entity) std::move(v.begin(), v.end(), std::back_inserter(u.tasks));

    u.ids.resize(u.tasks.size());
#pragma omp parallel for schedule(static) if (parallel)
    for (std::size_t i = 0; i < u.tasks.size(); ++i) u.ids[i] = task_id(u.tasks[i]);

    // Distinct tasks sharing a 64-bit id would make the store ambiguous.
    std::unordered_map<TaskId, std::size_t> seen;
    seen.reserve(u.ids.size());
    for (std::size_t i = 0; i < u.ids.size(); ++i) {
        auto [it, inserted] = seen.emplace(u.ids[i], i);
        if (!inserted && render_petel(u.tasks[it->second]) != render_petel(u.tasks[i]))
            throw std::logic_error("task id collision: " + format_task_id(u.ids[i]));
    }
    return u;
}

std::vector<std::string> entities_of(const Schema& schema) {
    auto entities = schema.names_of_kind(AttributeKind::Entity);
    if (entities.empty()) throw NoEntityAttribute();
    return entities;
}

} // namespace

TaskUniverse enumerate_tasks(const Schema& schema, const OpConfig& config) {
    config.validate();
    const auto entities = entities_of(schema);
    std::vector<std::vector<Task>> per_entity(entities.size());
#pragma omp parallel for schedule(dynamic)
    for (std::size_t e = 0; e < entities.size(); ++e) per_entity[e] = tasks_for_entity(schema, config, entities[e]);
    return assemble(schema, per_entity, true);
}

TaskUniverse enumerate_tasks_serial(const Schema& schema, const OpConfig& config) {
    config.validate();
    const auto entities = entities_of(schema);
    std::vector<std::vector<Task>> per_entity;
    for (const auto& e : entities) per_entity.push_back(tasks_for_entity(schema, config, e));
    return assemble(schema, per_entity, false);
}

std::uint64_t count_tasks(const Schema& schema, const OpConfig& config) {
    config.validate();
    const auto entities = entities_of(schema);
    std::uint64_t numeric = 0, groupable_count = 0;
    for (const auto& a : schema.attributes()) {
        if (a.kind == AttributeKind::Numerical) ++numeric;
        else if (groupable(a.kind)) ++groupable_count;
    }
    auto n_enabled = [&](auto... ops) { return static_cast<std::uint64_t>((config.enabled(ops) + ...)); };
    const std::uint64_t num_filters = n_enabled(FilterOp::Greater, FilterOp::Less);
    const std::uint64_t cat_filters = n_enabled(FilterOp::Eq, FilterOp::Neq);
    const std::uint64_t num_aggs = n_enabled(AggOp::Sum, AggOp::Avg, AggOp::Min, AggOp::Max);
    const std::uint64_t cat_aggs = n_enabled(AggOp::Majority);
    // Every entity excludes itself from the groupable pool.
    const std::uint64_t others = groupable_count - 1;
    const std::uint64_t filters = 1 + num_filters * numeric + cat_filters * others;
    const std::uint64_t aggs = 1 + num_aggs * numeric + cat_aggs * others;
    return static_cast<std::uint64_t>(entities.size()) * filters * aggs;
}

std::vector<Task> instantiate_thresholds(const Task& task, const AttributeStats& stats, const OpConfig& config) {
    if (!task.filter.needs_threshold() || task.filter.threshold) return {task};
    if (canonical_name(stats.attribute) != canonical_name(*task.filter.attribute))
        throw UnknownAttribute(*task.filter.attribute);
    if (stats.count_present == 0) throw NoDataForAttribute(stats.attribute);

    std::vector<Literal> literals;
    if (task.filter.op == FilterOp::Greater || task.filter.op == FilterOp::Less) {
        for (double q : config.threshold_quantiles) {
            const Literal v = nearest_rank(stats.sorted_values, q);
            if (std::find(literals.begin(), literals.end(), v) == literals.end()) literals.push_back(v);
        }
    } else {
        const std::size_t n = std::min(config.eq_value_limit, stats.frequencies.size());
        for (std::size_t i = 0; i < n; ++i) literals.emplace_back(stats.frequencies[i].first);
    }

    std::vector<Task> out;
    out.reserve(literals.size());
    for (auto& lit : literals) {
        Task t = task;
        t.filter.threshold = std::move(lit);
        out.push_back(std::move(t));
    }
    return out;
}

std::string export_universe_jsonl(const TaskUniverse& universe) {
    std::string out;
    for (std::size_t i = 0; i < universe.size(); ++i) {
        nlohmann::json line = {{"id", format_task_id(universe.ids[i])}, {"petel", render_petel(universe.tasks[i])}};
        out += line.dump();
        out += '\n';
    }
    return out;
}

} // namespace taskgen
