#include "taskgen/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "taskgen/errors.hpp"

namespace taskgen {

double nearest_rank(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw std::invalid_argument("nearest_rank of empty sample");
    const auto n = sorted.size();
    auto idx = static_cast<std::size_t>(std::floor(p * static_cast<double>(n)));
    return sorted[std::min(idx, n - 1)];
}

AttributeStats compute_stats(const Dataset& dataset, std::string_view attribute) {
    const std::size_t index = dataset.column_index(attribute);
    const auto& attr = dataset.schema().attributes()[index];
    const auto& col = dataset.column(index);

    AttributeStats st;
    st.attribute = attr.name;
    st.kind = attr.kind;

    if (attr.kind == AttributeKind::Time) {
        st.count_present = dataset.rows();
        st.sorted_values.assign(dataset.times().begin(), dataset.times().end());
    } else if (attr.kind == AttributeKind::Numerical) {
        for (std::size_t r = 0; r < dataset.rows(); ++r)
            if (col.has(r)) st.sorted_values.push_back(col.numbers[r]);
        st.count_present = st.sorted_values.size();
        std::sort(st.sorted_values.begin(), st.sorted_values.end());
    } else {
        std::map<std::string, std::size_t> counts;
        for (std::size_t r = 0; r < dataset.rows(); ++r) {
            if (!col.has(r)) continue;
            ++counts[col.text[r]];
            ++st.count_present;
        }
        st.frequencies.assign(counts.begin(), counts.end());
        std::stable_sort(st.frequencies.begin(), st.frequencies.end(),
                         [](const auto& a, const auto& b) { return a.second > b.second; });
    }
    st.count_missing = dataset.rows() - st.count_present;

    if (!st.sorted_values.empty()) {
        const std::span<const double> v(st.sorted_values);
        st.numeric = NumericSummary{v.front(), v.back(), nearest_rank(v, 0.25), nearest_rank(v, 0.5),
                                    nearest_rank(v, 0.75)};
    }
    return st;
}

} // namespace taskgen
