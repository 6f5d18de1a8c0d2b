#include "taskgen/labeling.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>

#include "taskgen/csv.hpp"
#include "taskgen/errors.hpp"

namespace taskgen {

LabelType label_type_for(AggOp op) noexcept {
    return op == AggOp::Majority ? LabelType::Categorical : LabelType::Numeric;
}

namespace {

Instant floor_div(Instant a, Instant b) {
    Instant q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

Instant granule(std::chrono::seconds window) {
    const Instant w = window.count();
    for (Instant g : {Instant{86400}, Instant{3600}, Instant{60}})
        if (w % g == 0) return g;
    return 1;
}

// Column lookups and predicate resolved once per task, then applied per
// cutoff without further validation.
struct LabelPlan {
    std::size_t entity_col = 0;
    FilterOp filter_op = FilterOp::All;
    std::size_t filter_col = 0;
    std::size_t other_col = 0;
    bool pair = false;
    double threshold_num = 0;
    std::string threshold_text;
    AggOp agg_op = AggOp::Count;
    std::size_t agg_col = 0;
    Instant lead = 0;
    Instant window = 0;
};

std::size_t text_column(const Dataset& ds, const std::string& name) {
    const std::size_t idx = ds.column_index(name);
    const auto kind = ds.schema().attributes()[idx].kind;
    if (kind != AttributeKind::Entity && kind != AttributeKind::Categorical)
        throw InvalidTask("attribute " + name + " is not categorical/entity");
    return idx;
}

std::size_t numeric_column(const Dataset& ds, const std::string& name) {
    const std::size_t idx = ds.column_index(name);
    if (ds.schema().attributes()[idx].kind != AttributeKind::Numerical)
        throw InvalidTask("attribute " + name + " is not numerical");
    return idx;
}

LabelPlan make_plan(const Task& task, const Dataset& ds) {
    check_params(task.params);
    LabelPlan p;
    p.entity_col = text_column(ds, task.entity);
    p.lead = task.params.lead.count();
    p.window = task.params.window.count();

    const auto& f = task.filter;
    p.filter_op = f.op;
    if (f.op != FilterOp::All) {
        if (!f.attribute) throw InvalidTask("filter needs an attribute");
        const bool numeric = f.op == FilterOp::Greater || f.op == FilterOp::Less;
        if (f.other_attribute) {
            p.pair = true;
            p.filter_col = numeric ? numeric_column(ds, *f.attribute) : text_column(ds, *f.attribute);
            p.other_col = numeric ? numeric_column(ds, *f.other_attribute) : text_column(ds, *f.other_attribute);
        } else {
            if (!f.threshold) throw UnresolvedThreshold();
            if (numeric) {
                p.filter_col = numeric_column(ds, *f.attribute);
                const double* v = std::get_if<double>(&*f.threshold);
                if (!v) throw InvalidTask("numeric filter needs a numeric threshold");
                p.threshold_num = *v;
            } else {
                p.filter_col = text_column(ds, *f.attribute);
                const std::string* s = std::get_if<std::string>(&*f.threshold);
                if (!s) throw InvalidTask("eq/neq filter needs a category literal");
                p.threshold_text = *s;
            }
        }
    }

    p.agg_op = task.agg.op;
    if (task.agg.op != AggOp::Count) {
        if (!task.agg.attribute) throw InvalidTask("aggregator needs an attribute");
        p.agg_col = task.agg.op == AggOp::Majority ? text_column(ds, *task.agg.attribute)
                                                   : numeric_column(ds, *task.agg.attribute);
    }
    return p;
}

bool passes(const LabelPlan& p, const Dataset& ds, std::size_t r) {
    if (p.filter_op == FilterOp::All) return true;
    const Column& c = ds.column(p.filter_col);
    if (!c.has(r)) return false;
    if (p.pair) {
        const Column& o = ds.column(p.other_col);
        if (!o.has(r)) return false;
        switch (p.filter_op) {
        case FilterOp::Greater: return c.numbers[r] > o.numbers[r];
        case FilterOp::Less: return c.numbers[r] < o.numbers[r];
        case FilterOp::Eq: return c.text[r] == o.text[r];
        case FilterOp::Neq: return c.text[r] != o.text[r];
        case FilterOp::All: return true;
        }
    }
    switch (p.filter_op) {
    case FilterOp::Greater: return c.numbers[r] > p.threshold_num;
    case FilterOp::Less: return c.numbers[r] < p.threshold_num;
    case FilterOp::Eq: return c.text[r] == p.threshold_text;
    case FilterOp::Neq: return c.text[r] != p.threshold_text;
    case FilterOp::All: return true;
    }
    return false;
}

std::optional<Label> label_at(const LabelPlan& p, const Dataset& ds, const Cutoff& cutoff) {
    const Instant begin = cutoff.time + p.lead;
    const auto [first, last] = ds.rows_between(begin, begin + p.window);
    const Column& ent = ds.column(p.entity_col);

    std::size_t count = 0;
    std::size_t agg_n = 0;
    double sum = 0, lo = 0, hi = 0;
    std::map<std::string_view, std::size_t> freq;
    for (std::size_t r = first; r < last; ++r) {
        if (!ent.has(r) || ent.text[r] != cutoff.entity_value) continue;
        if (!passes(p, ds, r)) continue;
        ++count;
        if (p.agg_op == AggOp::Count) continue;
        const Column& a = ds.column(p.agg_col);
        if (!a.has(r)) continue;
        if (p.agg_op == AggOp::Majority) {
            ++freq[a.text[r]];
            ++agg_n;
            continue;
        }
        const double v = a.numbers[r];
        if (agg_n == 0) lo = hi = v;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        sum += v;
        ++agg_n;
    }

    switch (p.agg_op) {
    case AggOp::Count: return Label(static_cast<double>(count));
    case AggOp::Sum: return Label(sum);
    case AggOp::Avg:
        if (agg_n == 0) return std::nullopt;
        return Label(sum / static_cast<double>(agg_n));
    case AggOp::Min:
        if (agg_n == 0) return std::nullopt;
        return Label(lo);
    case AggOp::Max:
        if (agg_n == 0) return std::nullopt;
        return Label(hi);
    case AggOp::Majority: {
        if (agg_n == 0) return std::nullopt;
        // map order is ascending, strict > keeps the smallest literal on ties
        auto best = freq.begin();
        for (auto it = freq.begin(); it != freq.end(); ++it)
            if (it->second > best->second) best = it;
        return Label(std::string(best->first));
    }
    }
    return std::nullopt;
}

TrainingSet assemble(const Task& task, const std::vector<Cutoff>& cutoffs,
                     std::vector<std::optional<Label>>& labels) {
    TrainingSet ts;
    ts.task = task;
    ts.label_type = label_type_for(task.agg.op);
    const Instant lead = task.params.lead.count();
    const Instant window = task.params.window.count();
    const Instant history = task.params.history.count();
    for (std::size_t i = 0; i < cutoffs.size(); ++i) {
        if (!labels[i]) {
            ++ts.skipped;
            continue;
        }
        const Instant t = cutoffs[i].time;
        ts.examples.push_back(
            LabeledExample{cutoffs[i], std::move(*labels[i]), t + lead, t + lead + window, t - history, t});
    }
    return ts;
}

} // namespace

Timeline timeline_for(const Dataset& dataset, const SearchParams& params) {
    if (dataset.empty()) throw EmptyDataset();
    const Instant g = granule(params.window);
    return Timeline{floor_div(dataset.min_time(), g) * g, (floor_div(dataset.max_time(), g) + 1) * g};
}

std::vector<Cutoff> generate_cutoffs(const Dataset& dataset, const Task& task) {
    check_params(task.params);
    const std::size_t ecol = text_column(dataset, task.entity);
    const Timeline tl = timeline_for(dataset, task.params);
    const Instant lead = task.params.lead.count();
    const Instant window = task.params.window.count();
    if (tl.end - tl.origin < lead + window) throw WindowExceedsSpan();

    const Column& col = dataset.column(ecol);
    std::set<std::string> values;
    for (std::size_t r = 0; r < dataset.rows(); ++r)
        if (col.has(r)) values.insert(col.text[r]);

    std::vector<Cutoff> out;
    for (const auto& v : values)
        for (Instant t = tl.origin; t + lead + window <= tl.end; t += window) out.push_back(Cutoff{v, t});
    return out;
}

std::optional<Label> compute_label(const Task& task, const Dataset& dataset, const Cutoff& cutoff) {
    return label_at(make_plan(task, dataset), dataset, cutoff);
}

TrainingSet build_training_set(const Task& task, const Dataset& dataset) {
    const LabelPlan plan = make_plan(task, dataset);
    const auto cutoffs = generate_cutoffs(dataset, task);
    std::vector<std::optional<Label>> labels(cutoffs.size());
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < cutoffs.size(); ++i) labels[i] = label_at(plan, dataset, cutoffs[i]);
    return assemble(task, cutoffs, labels);
}

TrainingSet build_training_set_serial(const Task& task, const Dataset& dataset) {
    const LabelPlan plan = make_plan(task, dataset);
    const auto cutoffs = generate_cutoffs(dataset, task);
    std::vector<std::optional<Label>> labels(cutoffs.size());
    for (std::size_t i = 0; i < cutoffs.size(); ++i) labels[i] = label_at(plan, dataset, cutoffs[i]);
    return assemble(task, cutoffs, labels);
}

SufficiencyReport assess_sufficiency(const TrainingSet& ts, const SufficiencyThresholds& th) {
    SufficiencyReport rep;
    rep.n_examples = ts.examples.size();
    if (ts.label_type == LabelType::Categorical)
        for (const auto& ex : ts.examples) ++rep.per_class[std::get<std::string>(ex.label)];
    if (rep.n_examples < th.min_total || rep.n_examples == 0) return rep;
    const double target = static_cast<double>(std::max<std::size_t>(th.target_total, 1));
    rep.score = std::clamp(static_cast<double>(rep.n_examples) / target, 0.0, 1.0);
    for (const auto& [cls, n] : rep.per_class)
        if (n < th.min_per_class) rep.score = 0.0;
    return rep;
}

std::string label_to_string(const Label& label) {
    if (const double* d = std::get_if<double>(&label)) {
        char buf[64];
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, *d);
        return std::string(buf, ptr);
    }
    return std::get<std::string>(label);
}

std::string training_set_csv(const TrainingSet& ts) {
    std::string out = "entity,cutoff_epoch,label\n";
    for (const auto& ex : ts.examples) {
        out += csv::escape_field(ex.cutoff.entity_value);
        out += ',';
        out += std::to_string(ex.cutoff.time);
        out += ',';
        out += csv::escape_field(label_to_string(ex.label));
        out += '\n';
    }
    return out;
}

nlohmann::json training_set_manifest(const TrainingSet& ts) {
    return {
        {"task_id", format_task_id(task_id(ts.task))},
        {"petel", render_petel(ts.task)},
        {"params",
         {{"window", format_duration(ts.task.params.window)},
          {"lead", format_duration(ts.task.params.lead)},
          {"history", format_duration(ts.task.params.history)}}},
        {"label_type", ts.label_type == LabelType::Categorical ? "categorical" : "numeric"},
        {"examples", ts.examples.size()},
        {"skipped", ts.skipped},
    };
}

} // namespace taskgen
