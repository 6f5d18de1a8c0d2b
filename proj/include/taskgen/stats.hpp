#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "taskgen/dataset.hpp"

namespace taskgen {

/// Nearest-rank quantile over an ascending-sorted sample: the element at
/// 0-based index min(n-1, floor(p*n)), i.e. the smallest x with F(x) > p.
double nearest_rank(std::span<const double> sorted, double p);

struct NumericSummary {
    double min = 0;
    double max = 0;
    double q25 = 0;
    double q50 = 0;
    double q75 = 0;
};

struct AttributeStats {
    std::string attribute;
    AttributeKind kind = AttributeKind::Numerical;
    std::size_t count_present = 0;
    std::size_t count_missing = 0;
    std::optional<NumericSummary> numeric; // Numerical with >= 1 present value
    // Categorical/Entity: most frequent first, ties by value ascending.
    std::vector<std::pair<std::string, std::size_t>> frequencies;
    // Present numeric values, ascending; kept for threshold instantiation.
    std::vector<double> sorted_values;
};

AttributeStats compute_stats(const Dataset& dataset, std::string_view attribute);

} // namespace taskgen
