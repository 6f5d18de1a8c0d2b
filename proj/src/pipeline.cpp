#include "taskgen/pipeline.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>

#include "taskgen/errors.hpp"

namespace taskgen {

void PipelineConfig::validate() const {
    if (k < 1) throw std::invalid_argument("K must be >= 1");
    if (m < k) throw std::invalid_argument("M must be >= K");
    if (!(lambda >= 0 && lambda <= 1)) throw std::invalid_argument("lambda must lie in [0, 1]");
    ops.validate();
    utility_weights.validate();
    for (double w : {promise_weights.preference, promise_weights.business, promise_weights.examples})
        if (!(w >= 0)) throw std::invalid_argument("promise weights must be non-negative");
    if (evaluation.bootstrap_resamples < 1) throw std::invalid_argument("bootstrap resamples must be >= 1");
}

PipelineConfig config_from_json(const nlohmann::json& doc, PipelineConfig c) {
    if (doc.is_null()) return c;
    if (!doc.is_object()) throw std::invalid_argument("config must be a JSON object");
    auto duration = [&](const char* key, std::chrono::seconds& out) {
        if (auto it = doc.find(key); it != doc.end()) {
            if (it->is_string()) out = parse_duration(it->get<std::string>());
            else if (it->is_number_integer()) out = std::chrono::seconds(it->get<std::int64_t>());
            else throw std::invalid_argument(std::string(key) + " must be a duration string");
        }
    };
    try {
        if (auto it = doc.find("m"); it != doc.end()) c.m = it->get<std::size_t>();
        if (auto it = doc.find("k"); it != doc.end()) c.k = it->get<std::size_t>();
        if (auto it = doc.find("lambda"); it != doc.end()) c.lambda = it->get<double>();
        if (auto it = doc.find("seed"); it != doc.end()) c.seed = it->get<std::uint64_t>();
        duration("window", c.ops.params.window);
        duration("lead", c.ops.params.lead);
        duration("history", c.ops.params.history);
        if (auto it = doc.find("timing"); it != doc.end()) {
            const auto t = it->get<std::string>();
            if (t == "modeled") c.evaluation.timing = TimingMode::Modeled;
            else if (t == "measured") c.evaluation.timing = TimingMode::Measured;
            else throw std::invalid_argument("timing must be modeled or measured");
        }
        if (auto it = doc.find("business_weights"); it != doc.end()) {
            c.business_weights.clear();
            for (const auto& [name, w] : it->items()) c.business_weights[canonical_name(name)] = w.get<double>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("bad config: ") + e.what());
    }
    // Per-field ranges only; M >= K is for validate() once flags are merged.
    if (c.m < 1 || c.k < 1) throw std::invalid_argument("m and k must be >= 1");
    if (!(c.lambda >= 0 && c.lambda <= 1)) throw std::invalid_argument("lambda must lie in [0, 1]");
    check_params(c.ops.params);
    return c;
}

namespace {

struct Candidate {
    Task task;
    TaskId id = 0;
    std::optional<TrainingSet> training;
    SufficiencyReport sufficiency;
    PromiseScore promise;
};

class StatsCache {
public:
    explicit StatsCache(const Dataset& ds) : ds_(ds) {}
    const AttributeStats& get(const std::string& attr) {
        auto it = cache_.find(attr);
        if (it == cache_.end()) it = cache_.emplace(attr, compute_stats(ds_, attr)).first;
        return it->second;
    }

private:
    const Dataset& ds_;
    std::map<std::string, AttributeStats> cache_;
};

// Instantiations whose numeric filter can select a row; less than the minimum
// or greater than the maximum would only ever label empty windows.
std::vector<Task> concrete_forms(const Task& family, StatsCache& stats, const OpConfig& ops) {
    if (!family.filter.needs_threshold() || family.filter.threshold) return {family};
    const auto& st = stats.get(*family.filter.attribute);
    if (st.count_present == 0) return {};
    auto forms = instantiate_thresholds(family, st, ops);
    if (family.filter.op == FilterOp::Less || family.filter.op == FilterOp::Greater) {
        std::erase_if(forms, [&](const Task& t) {
            const double x = std::get<double>(*t.filter.threshold);
            return family.filter.op == FilterOp::Less ? x <= st.sorted_values.front() : x >= st.sorted_values.back();
        });
    }
    return forms;
}

// Sufficiency of a task; a task whose training set cannot be built scores 0.
void assess(Candidate& c, const Dataset& ds, const SufficiencyThresholds& th) {
    try {
        c.training = build_training_set(c.task, ds);
        c.sufficiency = assess_sufficiency(*c.training, th);
    } catch (const WindowExceedsSpan&) {
        throw;
    } catch (const Error&) {
        c.training.reset();
        c.sufficiency = {};
    }
}

} // namespace

PipelineResult run_pipeline(const Dataset& ds, const PipelineConfig& config, const RankingModel& model,
                            MetricStore& store, std::string_view session_id) {
    config.validate();
    const Schema& schema = ds.schema();
    const std::string session(session_id);
    PipelineResult result;

    const TaskUniverse universe = enumerate_tasks(schema, config.ops);
    result.universe_size = universe.size();
    StatsCache stats(ds);

    auto record = [&](const Task& t, TaskId id, const char* status, std::optional<PromiseScore> promise = {},
                      std::optional<TaskMetrics> metrics = {}, std::optional<std::string> error = {}) {
        store.append(MetricRecord{session, id, render_petel(t), status, promise, metrics, std::move(error), 0});
    };

    // Families: promise from a representative instantiation.
    std::vector<ScoredTask> families;
    for (std::size_t i = 0; i < universe.size(); ++i) {
        const Task& family = universe.tasks[i];
        const TaskId id = universe.ids[i];
        const ValidityResult validity = check_validity(family, schema, config.rules);
        if (!validity.valid) {
            PromiseScore s;
            record(family, id, status::kInvalid, s, std::nullopt, validity.reasons.empty() ? "" : validity.reasons.front());
            continue;
        }
        ++result.valid_count;
        const auto forms = concrete_forms(family, stats, config.ops);
        SufficiencyReport suff;
        if (!forms.empty()) {
            // middle quantile for numeric thresholds, most frequent literal for eq/neq
            const bool literal = family.filter.op == FilterOp::Eq || family.filter.op == FilterOp::Neq;
            Candidate rep{forms[literal ? 0 : forms.size() / 2], 0, std::nullopt, {}, {}};
            assess(rep, ds, config.sufficiency);
            suff = rep.sufficiency;
        }
        const auto features = featurize_task(family, schema, std::nullopt, suff);
        families.push_back(ScoredTask{family, id,
                                      score_promise(family, validity, features, model, config.business_weights, suff,
                                                    config.promise_weights)});
    }

    const auto chosen = select_promising(families, config.m);
    result.families_selected = chosen.size();
    {
        std::map<TaskId, bool> picked;
        for (const auto& c : chosen) picked[c.id] = true;
        for (const auto& f : families)
            record(f.task, f.id, picked.count(f.id) ? status::kSelected : status::kScreened, f.score);
    }

    // Concrete tasks of the chosen families.
    std::vector<Candidate> concrete;
    for (const auto& fam : chosen) {
        for (auto& t : concrete_forms(fam.task, stats, config.ops)) {
            Candidate c{t, task_id(t), std::nullopt, {}, {}};
            assess(c, ds, config.sufficiency);
            const auto validity = check_validity(c.task, schema, config.rules);
            const auto features = featurize_task(c.task, schema, std::nullopt, c.sufficiency);
            c.promise = score_promise(c.task, validity, features, model, config.business_weights, c.sufficiency,
                                      config.promise_weights);
            concrete.push_back(std::move(c));
        }
    }
    result.candidates = concrete.size();

    std::vector<ScoredTask> scored;
    std::map<TaskId, std::size_t> by_id;
    for (std::size_t i = 0; i < concrete.size(); ++i) {
        if (!concrete[i].training || concrete[i].training->examples.empty()) continue;
        scored.push_back(ScoredTask{concrete[i].task, concrete[i].id, concrete[i].promise});
        by_id[concrete[i].id] = i;
    }
    const auto to_evaluate = select_promising(std::move(scored), config.m);
    {
        std::map<TaskId, bool> picked;
        for (const auto& s : to_evaluate) picked[s.id] = true;
        for (const auto& c : concrete)
            if (!picked.count(c.id)) record(c.task, c.id, status::kCandidate, c.promise);
    }

    const auto n = static_cast<std::ptrdiff_t>(to_evaluate.size());
    std::vector<std::optional<Evaluation>> evals(to_evaluate.size());
    std::vector<std::string> errors(to_evaluate.size());
#pragma omp parallel for schedule(dynamic) if (config.parallel)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const Candidate& c = concrete[by_id.at(to_evaluate[i].id)];
        try {
            if (config.before_evaluate) config.before_evaluate(c.task);
            EvaluationOptions opts = config.evaluation;
            opts.seed = mix_seed(config.seed, c.id);
            evals[i] = evaluate_task(c.task, *c.training, ds, opts);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        } catch (...) {
            errors[i] = "unknown error";
        }
    }

    for (std::size_t i = 0; i < to_evaluate.size(); ++i) {
        const Candidate& c = concrete[by_id.at(to_evaluate[i].id)];
        if (!evals[i]) {
            ++result.failed_count;
            record(c.task, c.id, status::kFailed, c.promise, std::nullopt, errors[i]);
            continue;
        }
        EvaluatedTask e;
        e.task = c.task;
        e.id = c.id;
        e.features = featurize_task(c.task, schema, evals[i]->metrics, c.sufficiency);
        e.business = business_value(c.task, config.business_weights);
        e.promise = c.promise;
        e.sufficiency = c.sufficiency;
        e.evaluation = *evals[i];
        record(c.task, c.id, status::kEvaluated, c.promise, e.evaluation.metrics);
        result.evaluated.push_back(std::move(e));
    }
    result.evaluated_count = result.evaluated.size();
    std::sort(result.evaluated.begin(), result.evaluated.end(),
              [](const EvaluatedTask& a, const EvaluatedTask& b) { return a.id < b.id; });

    result.recommendations =
        recommend(result.evaluated, schema, model, config.utility_weights, config.k, config.lambda);
    return result;
}

std::vector<Recommendation> recommend(const std::vector<EvaluatedTask>& evaluated, const Schema& schema,
                                      const RankingModel& model, const UtilityWeights& weights, std::size_t k,
                                      double lambda) {
    std::vector<Recommendation> all;
    all.reserve(evaluated.size());
    for (const auto& e : evaluated) {
        Recommendation r;
        r.task = e.task;
        r.id = e.id;
        r.petel = render_petel(e.task);
        r.nl = render_nl(e.task, schema);
        r.components = utility_inputs(e.features, model, e.business);
        r.utility = utility(r.components, weights);
        all.push_back(std::move(r));
    }
    const auto ranked = rank_static(std::move(all), evaluated.size());
    return rerank_diverse(ranked, lambda, k);
}

nlohmann::json recommendations_json(const std::vector<Recommendation>& recs) {
    auto arr = nlohmann::json::array();
    for (std::size_t i = 0; i < recs.size(); ++i) {
        auto j = to_json(recs[i]);
        j["rank"] = i + 1;
        arr.push_back(std::move(j));
    }
    return arr;
}

} // namespace taskgen
