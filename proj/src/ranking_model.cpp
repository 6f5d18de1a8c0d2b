#include "taskgen/ranking_model.hpp"

#include <cmath>

#include "taskgen/errors.hpp"

namespace taskgen {

namespace {

std::size_t filter_kind_slot(AttributeKind k) {
    switch (k) {
    case AttributeKind::Time: return 0;
    case AttributeKind::Entity: return 1;
    case AttributeKind::Categorical: return 2;
    case AttributeKind::Numerical: return 3;
    }
    return 0;
}

} // namespace

TaskFeatures featurize_task(const Task& task, const Schema& schema, const std::optional<TaskMetrics>& metrics,
                            const std::optional<SufficiencyReport>& sufficiency) {
    TaskFeatures f;
    auto& v = f.values;
    v[slot::kFilterOp + static_cast<std::size_t>(task.filter.op)] = 1;
    v[slot::kAggOp + static_cast<std::size_t>(task.agg.op)] = 1;
    if (task.filter.attribute)
        if (auto k = schema.kind_of(*task.filter.attribute)) v[slot::kFilterKind + filter_kind_slot(*k)] = 1;
    if (task.agg.attribute) {
        if (auto k = schema.kind_of(*task.agg.attribute); k && *k != AttributeKind::Time)
            v[slot::kAggKind + filter_kind_slot(*k) - 1] = 1;
    }
    v[slot::kHasThreshold] = task.filter.threshold ? 1 : 0;
    if (sufficiency) v[slot::kExamples] = sufficiency->score;
    if (metrics) {
        v[slot::kAccuracy] = metrics->accuracy;
        v[slot::kConfidence] = metrics->confidence;
        v[slot::kExplainability] = metrics->explainability;
        v[slot::kTimeScore] = 1.0 / (1.0 + metrics->seconds);
        f.has_metrics = true;
    }
    v[slot::kBias] = 1;
    return f;
}

double sigmoid(double z) noexcept {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

std::string_view to_string(Verdict v) { return v == Verdict::Useful ? "useful" : "not_useful"; }

std::optional<Verdict> verdict_from_string(std::string_view s) {
    if (s == "useful") return Verdict::Useful;
    if (s == "not_useful") return Verdict::NotUseful;
    return std::nullopt;
}

RankingModel::RankingModel(double eta) : eta_(eta) {
    if (!(eta > 0) || !std::isfinite(eta)) throw std::invalid_argument("learning rate must be > 0");
}

RankingModel::RankingModel(std::array<double, kFeatureDim> weights, double eta, std::size_t prior_feedback)
    : RankingModel(eta) {
    for (double w : weights)
        if (!std::isfinite(w)) throw std::invalid_argument("non-finite ranker weight");
    weights_ = weights;
    prior_feedback_ = prior_feedback;
}

double RankingModel::logit(const TaskFeatures& features) const noexcept {
    double z = 0;
    for (std::size_t i = 0; i < kFeatureDim; ++i) z += weights_[i] * features.values[i];
    return z;
}

RankingModel apply_feedback(RankingModel model, const TaskFeatures& features, const FeedbackEvent& event) {
    const double y = event.verdict == Verdict::Useful ? 1.0 : 0.0;
    const double step = model.eta_ * (y - model.preference(features));
    for (std::size_t i = 0; i < kFeatureDim; ++i) model.weights_[i] += step * features.values[i];
    model.log_.push_back(event);
    return model;
}

nlohmann::json export_model(const RankingModel& model) {
    return {
        {"version", kFeatureLayoutVersion},
        {"eta", model.eta()},
        {"weights", model.weights()},
        {"feedback_count", model.feedback_count()},
    };
}

RankingModel import_model(const nlohmann::json& blob, std::optional<double> eta_override) {
    if (!blob.is_object()) throw CorruptBlob("model blob must be a JSON object");
    const auto version = blob.find("version");
    if (version == blob.end() || !version->is_number_integer()) throw CorruptBlob("model blob has no integer version");
    if (version->get<int>() != kFeatureLayoutVersion)
        throw VersionError("model layout version " + std::to_string(version->get<int>()) + ", expected " +
                           std::to_string(kFeatureLayoutVersion));
    const auto weights = blob.find("weights");
    if (weights == blob.end() || !weights->is_array() || weights->size() != kFeatureDim)
        throw CorruptBlob("model blob needs " + std::to_string(kFeatureDim) + " weights");
    std::array<double, kFeatureDim> w{};
    for (std::size_t i = 0; i < kFeatureDim; ++i) {
        const auto& x = (*weights)[i];
        if (!x.is_number() || !std::isfinite(x.get<double>())) throw CorruptBlob("non-numeric ranker weight");
        w[i] = x.get<double>();
    }
    const auto eta = blob.find("eta");
    if (eta == blob.end() || !eta->is_number() || !(eta->get<double>() > 0)) throw CorruptBlob("model blob needs eta > 0");
    std::size_t prior = 0;
    if (auto fc = blob.find("feedback_count"); fc != blob.end()) {
        if (!fc->is_number_unsigned()) throw CorruptBlob("feedback_count must be a non-negative integer");
        prior = fc->get<std::size_t>();
    }
    const double rate = eta_override.value_or(eta->get<double>());
    try {
        return RankingModel(w, rate, prior);
    } catch (const std::invalid_argument& e) {
        throw CorruptBlob(e.what());
    }
}

RankingModel import_model_text(std::string_view blob_text, std::optional<double> eta_override) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(blob_text);
    } catch (const nlohmann::json::exception& e) {
        throw CorruptBlob(std::string("model blob is not JSON: ") + e.what());
    }
    return import_model(doc, eta_override);
}

} // namespace taskgen
