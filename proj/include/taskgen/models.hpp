#pragma once

#include <chrono>
#include <cstdint>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "taskgen/dataset.hpp"
#include "taskgen/labeling.hpp"

namespace taskgen {

/// Lag-aggregate features over [t - history, t) for the cutoff's entity:
/// per Numerical attribute (schema order) count, sum, mean, min, max and a
/// presence flag, then the window row count. Empty windows give zeros.
std::vector<double> featurize_window(const Dataset& dataset, std::string_view entity_attribute,
                                     const Cutoff& cutoff, std::chrono::seconds history);
std::size_t feature_dimension(const Schema& schema);

enum class ModelKind : std::uint8_t { ConstantBaseline, RidgeLinear, NearestCentroid };

std::string_view to_string(ModelKind kind);
bool supports(ModelKind kind, LabelType type) noexcept;
double explainability(ModelKind kind) noexcept;

struct Sample {
    std::vector<double> x;
    Label y;
};

inline constexpr double kRidgeLambda = 1e-3;

struct ConstantModel {
    Label value;
};

/// y = intercept + coefficients . x; intercept is not penalised.
struct RidgeModel {
    double intercept = 0;
    std::vector<double> coefficients;
};

/// Centroids live in standardised feature space (training mean/std).
struct CentroidModel {
    std::vector<std::string> classes; // ascending
    std::vector<std::vector<double>> centroids;
    std::vector<double> mean;
    std::vector<double> scale;
};

class FittedModel {
public:
    using State = std::variant<ConstantModel, RidgeModel, CentroidModel>;

    explicit FittedModel(State state) : state_(std::move(state)) {}

    ModelKind kind() const noexcept;
    Label predict(std::span<const double> x) const;
    const State& state() const noexcept { return state_; }

private:
    State state_;
};

/// Throws EmptyTrainingSet, LabelTypeMismatch.
FittedModel fit(ModelKind kind, std::span<const Sample> train, double ridge_lambda = kRidgeLambda);

} // namespace taskgen
