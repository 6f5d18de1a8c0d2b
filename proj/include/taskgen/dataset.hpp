#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "taskgen/schema.hpp"

namespace taskgen {

/// Epoch seconds, UTC.
using Instant = std::int64_t;

/// Parses `text` under a strftime-style pattern. Rejects trailing input and
/// out-of-range calendar fields.
std::optional<Instant> parse_time(std::string_view text, std::string_view format);
std::string format_time(Instant t, std::string_view format);

/// One attribute's cells. Numerical columns fill `numbers`, everything else
/// fills `text`; `present[i] == 0` marks a missing cell.
struct Column {
    AttributeKind kind = AttributeKind::Numerical;
    std::vector<double> numbers;
    std::vector<std::string> text;
    std::vector<std::uint8_t> present;

    bool has(std::size_t row) const { return present[row] != 0; }
};

struct RowInput {
    Instant time = 0;
    // One cell per schema attribute, index aligned; the time attribute's cell
    // is ignored.
    std::vector<std::optional<std::string>> cells;
};

/// Immutable event table, rows sorted ascending by time (stable).
class Dataset {
public:
    Dataset() = default;

    /// Sorts rows stably by time. Non-numeric text in a Numerical column is
    /// stored as missing and counted in `numeric_failures` when provided.
    static Dataset from_rows(Schema schema, std::vector<RowInput> rows,
                             std::size_t* numeric_failures = nullptr);

    const Schema& schema() const noexcept { return schema_; }
    std::size_t rows() const noexcept { return times_.size(); }
    bool empty() const noexcept { return times_.empty(); }
    const std::vector<Instant>& times() const noexcept { return times_; }
    Instant time(std::size_t row) const { return times_[row]; }
    Instant min_time() const { return times_.front(); }
    Instant max_time() const { return times_.back(); }

    const Column& column(std::size_t attribute_index) const { return columns_.at(attribute_index); }
    const Column& column(std::string_view name) const;
    std::size_t column_index(std::string_view name) const;

    /// Half-open row range [first, last) of rows with time in [from, to).
    std::pair<std::size_t, std::size_t> rows_between(Instant from, Instant to) const;

private:
    Schema schema_;
    std::vector<Instant> times_;
    std::vector<Column> columns_;
};

struct LoadReport {
    std::size_t rows_read = 0;
    std::size_t rows_loaded = 0;
    std::size_t dropped = 0;               // unparseable time cell
    std::vector<std::size_t> dropped_lines;
    std::size_t numeric_failures = 0;      // numeric cells stored as missing
};

struct LoadResult {
    Dataset dataset;
    LoadReport report;
};

LoadResult load_dataset(const std::filesystem::path& table_path, const Schema& schema);
LoadResult load_dataset_from_string(std::string_view csv_text, const Schema& schema);

/// First-contact kind inference; a declared sidecar always wins.
Schema infer_schema(const std::filesystem::path& table_path);
Schema infer_schema_from_string(std::string_view csv_text, std::string name = "inferred");

struct ValidationReport {
    std::size_t row_count = 0;
    Instant min_time = 0;
    Instant max_time = 0;
    Instant span_seconds = 0;
    std::map<std::string, double> missing_rate;
    std::vector<std::string> flagged; // missing_rate >= flag threshold
};

ValidationReport validate_dataset(const Dataset& dataset, double flag_missing_rate = 0.5);

/// Canonical text form (epoch times, schema order). Two loads of the same file
/// serialize identically.
std::string serialize_dataset(const Dataset& dataset);

} // namespace taskgen
