#include "taskgen/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <Eigen/Dense>

#include "taskgen/errors.hpp"

namespace taskgen {

std::string_view to_string(ModelKind kind) {
    switch (kind) {
    case ModelKind::ConstantBaseline: return "constant";
    case ModelKind::RidgeLinear: return "ridge";
    case ModelKind::NearestCentroid: return "nearest_centroid";
    }
    return "?";
}

bool supports(ModelKind kind, LabelType type) noexcept {
    switch (kind) {
    case ModelKind::ConstantBaseline: return true;
    case ModelKind::RidgeLinear: return type == LabelType::Numeric;
    case ModelKind::NearestCentroid: return type == LabelType::Categorical;
    }
    return false;
}

double explainability(ModelKind kind) noexcept {
    switch (kind) {
    case ModelKind::ConstantBaseline: return 1.0;
    case ModelKind::RidgeLinear: return 0.8;
    case ModelKind::NearestCentroid: return 0.6;
    }
    return 0.0;
}

ModelKind FittedModel::kind() const noexcept {
    switch (state_.index()) {
    case 0: return ModelKind::ConstantBaseline;
    case 1: return ModelKind::RidgeLinear;
    default: return ModelKind::NearestCentroid;
    }
}

Label FittedModel::predict(std::span<const double> x) const {
    if (const auto* c = std::get_if<ConstantModel>(&state_)) return c->value;
    if (const auto* r = std::get_if<RidgeModel>(&state_)) {
        double y = r->intercept;
        for (std::size_t j = 0; j < r->coefficients.size(); ++j) y += r->coefficients[j] * x[j];
        return y;
    }
    const auto& m = std::get<CentroidModel>(state_);
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < m.centroids.size(); ++c) {
        double d = 0;
        for (std::size_t j = 0; j < x.size(); ++j) {
            const double z = (x[j] - m.mean[j]) / m.scale[j] - m.centroids[c][j];
            d += z * z;
        }
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return m.classes[best];
}

namespace {

LabelType type_of(std::span<const Sample> train) {
    const bool numeric = std::holds_alternative<double>(train.front().y);
    for (const auto& s : train)
        if (std::holds_alternative<double>(s.y) != numeric) throw LabelTypeMismatch("mixed label types");
    return numeric ? LabelType::Numeric : LabelType::Categorical;
}

ConstantModel fit_constant(std::span<const Sample> train, LabelType type) {
    if (type == LabelType::Numeric) {
        double sum = 0;
        for (const auto& s : train) sum += std::get<double>(s.y);
        return {sum / static_cast<double>(train.size())};
    }
    std::map<std::string, std::size_t> freq;
    for (const auto& s : train) ++freq[std::get<std::string>(s.y)];
    auto best = freq.begin();
    for (auto it = freq.begin(); it != freq.end(); ++it)
        if (it->second > best->second) best = it;
    return {best->first};
}

RidgeModel fit_ridge(std::span<const Sample> train, double lambda) {
    const auto n = static_cast<Eigen::Index>(train.size());
    const auto d = static_cast<Eigen::Index>(train.front().x.size());
    Eigen::MatrixXd X(n, d + 1);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& s = train[static_cast<std::size_t>(i)];
        if (static_cast<Eigen::Index>(s.x.size()) != d) throw std::invalid_argument("ragged feature vectors");
        X(i, 0) = 1.0;
        for (Eigen::Index j = 0; j < d; ++j) X(i, j + 1) = s.x[static_cast<std::size_t>(j)];
        y(i) = std::get<double>(s.y);
    }
    Eigen::MatrixXd A = X.transpose() * X;
    A.diagonal().tail(d).array() += lambda;
    // Column 0 is the intercept and stays unpenalised.
    const Eigen::VectorXd w = A.ldlt().solve(X.transpose() * y);
    RidgeModel m;
    m.intercept = w(0);
    m.coefficients.assign(w.data() + 1, w.data() + 1 + d);
    return m;
}

CentroidModel fit_centroids(std::span<const Sample> train) {
    const std::size_t d = train.front().x.size();
    const double n = static_cast<double>(train.size());
    CentroidModel m;
    m.mean.assign(d, 0.0);
    m.scale.assign(d, 0.0);
    for (const auto& s : train)
        for (std::size_t j = 0; j < d; ++j) m.mean[j] += s.x[j];
    for (auto& v : m.mean) v /= n;
    for (const auto& s : train)
        for (std::size_t j = 0; j < d; ++j) m.scale[j] += (s.x[j] - m.mean[j]) * (s.x[j] - m.mean[j]);
    for (auto& v : m.scale) v = v > 0 ? std::sqrt(v / n) : 1.0;

    std::map<std::string, std::pair<std::vector<double>, std::size_t>> acc;
    for (const auto& s : train) {
        auto& [sum, count] = acc[std::get<std::string>(s.y)];
        sum.resize(d, 0.0);
        for (std::size_t j = 0; j < d; ++j) sum[j] += (s.x[j] - m.mean[j]) / m.scale[j];
        ++count;
    }
    for (auto& [cls, sc] : acc) {
        m.classes.push_back(cls);
        for (auto& v : sc.first) v /= static_cast<double>(sc.second);
        m.centroids.push_back(std::move(sc.first));
    }
    return m;
}

} // namespace

FittedModel fit(ModelKind kind, std::span<const Sample> train, double ridge_lambda) {
    if (train.empty()) throw EmptyTrainingSet();
    const LabelType type = type_of(train);
    if (!supports(kind, type))
        throw LabelTypeMismatch(std::string(to_string(kind)) + " does not support these labels");
    switch (kind) {
    case ModelKind::ConstantBaseline: return FittedModel(fit_constant(train, type));
    case ModelKind::RidgeLinear: return FittedModel(fit_ridge(train, ridge_lambda));
    case ModelKind::NearestCentroid: return FittedModel(fit_centroids(train));
    }
    throw std::logic_error("unreachable");
}

} // namespace taskgen
