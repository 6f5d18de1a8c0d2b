#include "taskgen/recommender.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "taskgen/errors.hpp"

namespace taskgen {

double business_value(const Task& task, const BusinessWeights& weights) {
    std::vector<std::string> attrs{canonical_name(task.entity)};
    if (task.filter.attribute) attrs.push_back(canonical_name(*task.filter.attribute));
    if (task.filter.other_attribute) attrs.push_back(canonical_name(*task.filter.other_attribute));
    if (task.agg.attribute) attrs.push_back(canonical_name(*task.agg.attribute));
    double sum = 0;
    for (const auto& a : attrs) {
        double w = kDefaultBusinessWeight;
        for (const auto& [name, value] : weights)
            if (canonical_name(name) == a) w = std::clamp(value, 0.0, 1.0);
        sum += w;
    }
    return sum / static_cast<double>(attrs.size());
}

PromiseScore score_promise(const Task& task, const ValidityResult& validity, const TaskFeatures& features,
                           const RankingModel& model, const BusinessWeights& business_weights,
                           const SufficiencyReport& sufficiency, const PromiseWeights& w) {
    PromiseScore s;
    s.validity = validity.valid ? 1.0 : 0.0;
    s.preference = model.preference(features);
    s.business = business_value(task, business_weights);
    s.examples = sufficiency.score;
    s.promise = s.validity * (w.preference * s.preference + w.business * s.business + w.examples * s.examples);
    return s;
}

std::vector<ScoredTask> select_promising(std::vector<ScoredTask> scored, std::size_t m) {
    std::erase_if(scored, [](const ScoredTask& t) { return t.score.validity != 1.0; });
    std::sort(scored.begin(), scored.end(), [](const ScoredTask& a, const ScoredTask& b) {
        return a.score.promise != b.score.promise ? a.score.promise > b.score.promise : a.id < b.id;
    });
    if (scored.size() > m) scored.resize(m);
    return scored;
}

void UtilityWeights::validate() const {
    const double w[] = {preference, business, examples, accuracy, time_score, confidence, explainability};
    double sum = 0;
    for (double x : w) {
        if (!(x >= 0)) throw std::invalid_argument("utility weights must be non-negative");
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("utility weights must sum to 1");
}

double utility(const UtilityInputs& in, const UtilityWeights& w) {
    return w.preference * in.preference + w.business * in.business + w.examples * in.examples +
           w.accuracy * in.accuracy + w.time_score * in.time_score + w.confidence * in.confidence +
           w.explainability * in.explainability;
}

UtilityInputs utility_inputs(const TaskFeatures& features, const RankingModel& model, double business) {
    if (!features.has_metrics) throw MissingMetrics();
    const auto& v = features.values;
    return UtilityInputs{model.preference(features), business,         v[slot::kExamples],
                         v[slot::kAccuracy],         v[slot::kTimeScore], v[slot::kConfidence],
                         v[slot::kExplainability]};
}

double score_utility(const TaskFeatures& features, const UtilityWeights& weights, const RankingModel& model,
                     double business) {
    return utility(utility_inputs(features, model, business), weights);
}

std::vector<Recommendation> rank_static(std::vector<Recommendation> candidates, std::size_t k) {
    std::sort(candidates.begin(), candidates.end(), [](const Recommendation& a, const Recommendation& b) {
        return a.utility != b.utility ? a.utility > b.utility : a.id < b.id;
    });
    if (candidates.size() > k) candidates.resize(k);
    return candidates;
}

namespace {

std::set<std::string> signature(const Task& t) {
    std::set<std::string> s{"entity=" + canonical_name(t.entity), "filter_op=" + std::string(op_name(t.filter.op)),
                            "agg_op=" + std::string(op_name(t.agg.op))};
    if (t.filter.attribute) s.insert("filter_attr=" + canonical_name(*t.filter.attribute));
    if (t.filter.other_attribute) s.insert("filter_attr2=" + canonical_name(*t.filter.other_attribute));
    if (t.agg.attribute) s.insert("agg_attr=" + canonical_name(*t.agg.attribute));
    return s;
}

} // namespace

double diversity(const Task& a, const Task& b) {
    const auto sa = signature(a);
    const auto sb = signature(b);
    std::size_t common = 0;
    for (const auto& x : sa) common += sb.count(x);
    const std::size_t total = sa.size() + sb.size() - common;
    return 1.0 - static_cast<double>(common) / static_cast<double>(total);
}

std::vector<Recommendation> rerank_diverse(const std::vector<Recommendation>& ranked, double lambda, std::size_t k) {
    if (!(lambda >= 0 && lambda <= 1)) throw std::invalid_argument("lambda must lie in [0, 1]");
    std::vector<Recommendation> out;
    if (ranked.empty() || k == 0) return out;
    std::vector<bool> taken(ranked.size(), false);
    // min diversity to anything picked so far
    std::vector<double> nearest(ranked.size(), 1.0);

    std::size_t first = 0;
    for (std::size_t i = 1; i < ranked.size(); ++i)
        if (ranked[i].utility > ranked[first].utility) first = i;

    std::size_t pick = first;
    while (true) {
        taken[pick] = true;
        out.push_back(ranked[pick]);
        if (out.size() == k || out.size() == ranked.size()) break;
        for (std::size_t i = 0; i < ranked.size(); ++i)
            if (!taken[i]) nearest[i] = std::min(nearest[i], diversity(ranked[i].task, ranked[pick].task));
        bool found = false;
        double best = 0;
        for (std::size_t i = 0; i < ranked.size(); ++i) {
            if (taken[i]) continue;
            const double mmr = lambda * ranked[i].utility + (1.0 - lambda) * nearest[i];
            if (!found || mmr > best) {
                best = mmr;
                pick = i;
                found = true;
            }
        }
    }
    return out;
}

nlohmann::json to_json(const PromiseScore& s) {
    return {{"f_v", s.validity}, {"f_p", s.preference}, {"f_b", s.business}, {"f_e", s.examples}, {"promise", s.promise}};
}

nlohmann::json to_json(const TaskMetrics& m) {
    return {{"f_a", m.accuracy}, {"f_tau", m.seconds}, {"f_c", m.confidence}, {"f_x", m.explainability}};
}

nlohmann::json to_json(const Recommendation& r) {
    const auto& c = r.components;
    return {
        {"task_id", format_task_id(r.id)},
        {"petel", r.petel},
        {"nl", r.nl},
        {"utility", r.utility},
        {"components",
         {{"f_p", c.preference},
          {"f_b", c.business},
          {"f_e", c.examples},
          {"f_a", c.accuracy},
          {"f_tau_score", c.time_score},
          {"f_c", c.confidence},
          {"f_x", c.explainability}}},
    };
}

} // namespace taskgen
