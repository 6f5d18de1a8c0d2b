#include <algorithm>

#include "taskgen/errors.hpp"
#include "taskgen/models.hpp"

namespace taskgen {

std::size_t feature_dimension(const Schema& schema) {
    return 6 * schema.names_of_kind(AttributeKind::Numerical).size() + 1;
}

std::vector<double> featurize_window(const Dataset& dataset, std::string_view entity_attribute,
                                     const Cutoff& cutoff, std::chrono::seconds history) {
    const auto& schema = dataset.schema();
    const Column& ent = dataset.column(entity_attribute);
    std::vector<std::size_t> numeric;
    for (std::size_t a = 0; a < schema.attributes().size(); ++a)
        if (schema.attributes()[a].kind == AttributeKind::Numerical) numeric.push_back(a);

    std::vector<double> out(6 * numeric.size() + 1, 0.0);
    const auto [first, last] = dataset.rows_between(cutoff.time - history.count(), cutoff.time);
    std::size_t rows = 0;
    for (std::size_t r = first; r < last; ++r) {
        if (!ent.has(r) || ent.text[r] != cutoff.entity_value) continue;
        ++rows;
        for (std::size_t k = 0; k < numeric.size(); ++k) {
            const Column& c = dataset.column(numeric[k]);
            if (!c.has(r)) continue;
            double* slot = &out[6 * k];
            const double v = c.numbers[r];
            if (slot[0] == 0) {
                slot[3] = v;
                slot[4] = v;
            }
            slot[0] += 1;
            slot[1] += v;
            slot[3] = std::min(slot[3], v);
            slot[4] = std::max(slot[4], v);
        }
    }
    for (std::size_t k = 0; k < numeric.size(); ++k) {
        double* slot = &out[6 * k];
        if (slot[0] > 0) {
            slot[2] = slot[1] / slot[0];
            slot[5] = 1;
        }
    }
    out.back() = static_cast<double>(rows);
    return out;
}

} // namespace taskgen
