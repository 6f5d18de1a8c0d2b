#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "taskgen/dataset.hpp"
#include "taskgen/petel.hpp"

namespace taskgen {

struct Cutoff {
    std::string entity_value;
    Instant time = 0;

    bool operator==(const Cutoff&) const = default;
};

using Label = std::variant<double, std::string>;

enum class LabelType { Numeric, Categorical };

LabelType label_type_for(AggOp op) noexcept;

struct LabeledExample {
    Cutoff cutoff;
    Label label;
    Instant label_begin = 0; // [cutoff + lead, cutoff + lead + window)
    Instant label_end = 0;
    Instant feature_begin = 0; // [cutoff - history, cutoff)
    Instant feature_end = 0;
};

struct TrainingSet {
    Task task;
    std::vector<LabeledExample> examples; // ordered by (entity, cutoff)
    LabelType label_type = LabelType::Numeric;
    std::size_t skipped = 0; // cutoffs whose label was undefined
};

/// Segments used by generate_cutoffs: the timeline is cut into granules of
/// the largest unit in {day, hour, minute} dividing the window; the usable
/// span runs from the first granule's start to the last granule's end.
struct Timeline {
    Instant origin = 0;
    Instant end = 0;
};
Timeline timeline_for(const Dataset& dataset, const SearchParams& params);

/// Tumbling cutoffs at stride = window, per distinct entity value (values in
/// ascending order). Only cutoffs whose label window fits the span are kept.
std::vector<Cutoff> generate_cutoffs(const Dataset& dataset, const Task& task);

/// Filter then aggregate the cutoff entity's rows inside the label window.
/// Empty selection: count/sum give 0, the rest are undefined (nullopt).
std::optional<Label> compute_label(const Task& task, const Dataset& dataset, const Cutoff& cutoff);

/// Labels every cutoff concurrently; result identical to the serial version.
TrainingSet build_training_set(const Task& task, const Dataset& dataset);
TrainingSet build_training_set_serial(const Task& task, const Dataset& dataset);

struct SufficiencyThresholds {
    std::size_t min_total = 30;
    std::size_t target_total = 200;
    std::size_t min_per_class = 5;
};

struct SufficiencyReport {
    std::size_t n_examples = 0;
    std::map<std::string, std::size_t> per_class; // categorical labels only
    double score = 0.0;                           // f_e
};

SufficiencyReport assess_sufficiency(const TrainingSet& ts, const SufficiencyThresholds& thresholds = {});

std::string label_to_string(const Label& label);

/// CSV: entity,cutoff_epoch,label
std::string training_set_csv(const TrainingSet& ts);
nlohmann::json training_set_manifest(const TrainingSet& ts);

} // namespace taskgen
