#include "taskgen/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <ctime>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "taskgen/csv.hpp"
#include "taskgen/errors.hpp"

namespace taskgen {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

std::optional<double> parse_number(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

std::string format_number(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open table: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

std::optional<Instant> parse_time(std::string_view text, std::string_view format) {
    const std::string s(trim(text));
    if (s.empty()) return std::nullopt;
    std::tm tm{};
    const char* rest = strptime(s.c_str(), std::string(format).c_str(), &tm);
    if (rest == nullptr || *rest != '\0') return std::nullopt;
    const std::tm requested = tm;
    const time_t t = timegm(&tm);
    // timegm normalises out-of-range fields (Feb 30 -> Mar 2); reject those.
    std::tm back{};
    gmtime_r(&t, &back);
    if (back.tm_year != requested.tm_year || back.tm_mon != requested.tm_mon ||
        back.tm_mday != requested.tm_mday || back.tm_hour != requested.tm_hour ||
        back.tm_min != requested.tm_min || back.tm_sec != requested.tm_sec)
        return std::nullopt;
    return static_cast<Instant>(t);
}

std::string format_time(Instant t, std::string_view format) {
    const time_t tt = static_cast<time_t>(t);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[128];
    const std::size_t n = std::strftime(buf, sizeof buf, std::string(format).c_str(), &tm);
    return std::string(buf, n);
}

Dataset Dataset::from_rows(Schema schema, std::vector<RowInput> rows, std::size_t* numeric_failures) {
    Dataset ds;
    const std::size_t n = rows.size();
    const std::size_t width = schema.attributes().size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return rows[a].time < rows[b].time; });

    ds.times_.reserve(n);
    for (std::size_t r : order) ds.times_.push_back(rows[r].time);

    std::size_t failures = 0;
    ds.columns_.resize(width);
    for (std::size_t c = 0; c < width; ++c) {
        Column& col = ds.columns_[c];
        col.kind = schema.attributes()[c].kind;
        col.present.assign(n, 0);
        if (col.kind == AttributeKind::Numerical) col.numbers.assign(n, 0.0);
        else col.text.assign(n, std::string());
        if (col.kind == AttributeKind::Time) {
            std::fill(col.present.begin(), col.present.end(), std::uint8_t{1});
            continue;
        }
        for (std::size_t i = 0; i < n; ++i) {
            const auto& cells = rows[order[i]].cells;
            if (c >= cells.size() || !cells[c]) continue;
            const std::string_view raw = trim(*cells[c]);
            if (raw.empty()) continue;
            if (col.kind == AttributeKind::Numerical) {
                if (auto v = parse_number(raw)) {
                    col.numbers[i] = *v;
                    col.present[i] = 1;
                } else {
                    ++failures;
                }
            } else {
                col.text[i] = std::string(raw);
                col.present[i] = 1;
            }
        }
    }
    if (numeric_failures) *numeric_failures = failures;
    ds.schema_ = std::move(schema);
    return ds;
}

std::size_t Dataset::column_index(std::string_view name) const {
    if (auto i = schema_.index_of(name)) return *i;
    throw UnknownAttribute(std::string(name));
}

const Column& Dataset::column(std::string_view name) const { return columns_.at(column_index(name)); }

std::pair<std::size_t, std::size_t> Dataset::rows_between(Instant from, Instant to) const {
    auto first = std::lower_bound(times_.begin(), times_.end(), from);
    auto last = std::lower_bound(first, times_.end(), to);
    return {static_cast<std::size_t>(first - times_.begin()),
            static_cast<std::size_t>(last - times_.begin())};
}

LoadResult load_dataset_from_string(std::string_view csv_text, const Schema& schema) {
    const auto records = csv::parse(csv_text);
    if (records.empty()) throw EmptyDataset();

    const auto& header = records.front().fields;
    std::vector<std::string> names;
    names.reserve(header.size());
    for (const auto& h : header) names.push_back(canonical_name(trim(h)));

    const auto& attrs = schema.attributes();
    std::vector<std::size_t> source(attrs.size());
    for (std::size_t a = 0; a < attrs.size(); ++a) {
        auto it = std::find(names.begin(), names.end(), attrs[a].name);
        if (it == names.end()) {
            if (attrs[a].kind == AttributeKind::Time) throw NoTimeColumn();
            throw MissingColumn(attrs[a].name);
        }
        source[a] = static_cast<std::size_t>(it - names.begin());
    }

    LoadResult result;
    std::vector<RowInput> rows;
    rows.reserve(records.size() - 1);
    const std::size_t time_src = source[schema.time_index()];
    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& fields = records[r].fields;
        ++result.report.rows_read;
        std::optional<Instant> t;
        if (time_src < fields.size()) t = parse_time(fields[time_src], schema.time_format());
        if (!t) {
            ++result.report.dropped;
            result.report.dropped_lines.push_back(records[r].line);
            continue;
        }
        RowInput row;
        row.time = *t;
        row.cells.resize(attrs.size());
        for (std::size_t a = 0; a < attrs.size(); ++a)
            if (source[a] < fields.size()) row.cells[a] = fields[source[a]];
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw EmptyDataset();
    result.dataset = Dataset::from_rows(schema, std::move(rows), &result.report.numeric_failures);
    result.report.rows_loaded = result.dataset.rows();
    return result;
}

LoadResult load_dataset(const std::filesystem::path& table_path, const Schema& schema) {
    return load_dataset_from_string(read_file(table_path), schema);
}

namespace {

constexpr const char* kTimeFormats[] = {
    "%Y-%m-%d %H:%M:%S", "%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M", "%Y-%m-%d", "%m/%d/%Y",
};

} // namespace

Schema infer_schema_from_string(std::string_view csv_text, std::string name) {
    const auto records = csv::parse(csv_text);
    if (records.size() < 2) throw EmptyDataset();
    const auto& header = records.front().fields;

    std::vector<Attribute> attrs;
    std::string time_format;
    bool have_time = false;
    for (std::size_t c = 0; c < header.size(); ++c) {
        std::vector<std::string_view> cells;
        for (std::size_t r = 1; r < records.size(); ++r) {
            const auto& f = records[r].fields;
            if (c < f.size() && !trim(f[c]).empty()) cells.push_back(trim(f[c]));
        }
        Attribute attr{canonical_name(trim(header[c])), AttributeKind::Categorical};
        if (!have_time && !cells.empty()) {
            for (const char* fmt : kTimeFormats) {
                if (std::all_of(cells.begin(), cells.end(),
                                [&](std::string_view v) { return parse_time(v, fmt).has_value(); })) {
                    attr.kind = AttributeKind::Time;
                    time_format = fmt;
                    have_time = true;
                    break;
                }
            }
            if (attr.kind == AttributeKind::Time) {
                attrs.push_back(std::move(attr));
                continue;
            }
        }
        if (!cells.empty() &&
            std::all_of(cells.begin(), cells.end(), [](std::string_view v) { return parse_number(v).has_value(); })) {
            attr.kind = AttributeKind::Numerical;
        } else {
            const std::set<std::string_view> distinct(cells.begin(), cells.end());
            const double ratio = cells.empty() ? 0.0
                                               : static_cast<double>(distinct.size()) /
                                                     static_cast<double>(cells.size());
            attr.kind = ratio <= 0.5 ? AttributeKind::Categorical : AttributeKind::Entity;
        }
        attrs.push_back(std::move(attr));
    }
    if (!have_time) throw NoTimeColumn();
    return Schema(std::move(name), std::move(attrs), time_format);
}

Schema infer_schema(const std::filesystem::path& table_path) {
    return infer_schema_from_string(read_file(table_path), table_path.stem().string());
}

ValidationReport validate_dataset(const Dataset& dataset, double flag_missing_rate) {
    ValidationReport rep;
    rep.row_count = dataset.rows();
    if (dataset.empty()) return rep;
    rep.min_time = dataset.min_time();
    rep.max_time = dataset.max_time();
    rep.span_seconds = rep.max_time - rep.min_time;
    const auto& attrs = dataset.schema().attributes();
    for (std::size_t a = 0; a < attrs.size(); ++a) {
        if (attrs[a].kind == AttributeKind::Time) continue;
        const auto& col = dataset.column(a);
        const auto missing = static_cast<double>(std::count(col.present.begin(), col.present.end(), 0));
        const double rate = missing / static_cast<double>(rep.row_count);
        rep.missing_rate[attrs[a].name] = rate;
        if (rate >= flag_missing_rate) rep.flagged.push_back(attrs[a].name);
    }
    return rep;
}

std::string serialize_dataset(const Dataset& dataset) {
    std::string out;
    const auto& attrs = dataset.schema().attributes();
    for (std::size_t a = 0; a < attrs.size(); ++a) {
        if (a) out += ',';
        out += csv::escape_field(attrs[a].name);
    }
    out += '\n';
    for (std::size_t r = 0; r < dataset.rows(); ++r) {
        for (std::size_t a = 0; a < attrs.size(); ++a) {
            if (a) out += ',';
            const auto& col = dataset.column(a);
            if (attrs[a].kind == AttributeKind::Time) out += std::to_string(dataset.time(r));
            else if (!col.has(r)) continue;
            else if (col.kind == AttributeKind::Numerical) out += format_number(col.numbers[r]);
            else out += csv::escape_field(col.text[r]);
        }
        out += '\n';
    }
    return out;
}

} // namespace taskgen
