#include "taskgen/petel.hpp"

#include <charconv>
#include <cstdio>
#include <stdexcept>

#include "taskgen/errors.hpp"
#include "taskgen/validity.hpp"

namespace taskgen {

std::string_view op_name(FilterOp op) {
    switch (op) {
    case FilterOp::All: return "all_fil";
    case FilterOp::Greater: return "greater_fil";
    case FilterOp::Less: return "less_fil";
    case FilterOp::Eq: return "eq_fil";
    case FilterOp::Neq: return "neq_fil";
    }
    return "?";
}

std::string_view op_name(AggOp op) {
    switch (op) {
    case AggOp::Count: return "count_agg";
    case AggOp::Sum: return "sum_agg";
    case AggOp::Avg: return "avg_agg";
    case AggOp::Min: return "min_agg";
    case AggOp::Max: return "max_agg";
    case AggOp::Majority: return "majority_agg";
    }
    return "?";
}

std::optional<FilterOp> filter_op_from_name(std::string_view name) {
    for (FilterOp op : kAllFilterOps) {
        const auto canonical = op_name(op);
        if (name == canonical) return op;
        // long alias: greater_fil -> greater_filter
        if (name.size() == canonical.size() + 3 && name.starts_with(canonical) && name.ends_with("ter"))
            return op;
    }
    return std::nullopt;
}

std::optional<AggOp> agg_op_from_name(std::string_view name) {
    for (AggOp op : kAllAggOps)
        if (name == op_name(op)) return op;
    return std::nullopt;
}

void check_params(const SearchParams& p) {
    if (p.window.count() <= 0) throw std::invalid_argument("window must be > 0");
    if (p.lead.count() < 0) throw std::invalid_argument("lead must be >= 0");
    if (p.history.count() <= 0) throw std::invalid_argument("history must be > 0");
}

std::chrono::seconds parse_duration(std::string_view text) {
    if (text.size() < 2) throw std::invalid_argument("bad duration: " + std::string(text));
    long long n = 0;
    const char* first = text.data();
    const char* last = text.data() + text.size() - 1;
    auto [ptr, ec] = std::from_chars(first, last, n);
    if (ec != std::errc() || ptr != last || n < 0) throw std::invalid_argument("bad duration: " + std::string(text));
    switch (text.back()) {
    case 'd': return std::chrono::seconds(n * 86400);
    case 'h': return std::chrono::seconds(n * 3600);
    case 'm': return std::chrono::seconds(n * 60);
    default: throw std::invalid_argument("bad duration unit: " + std::string(text));
    }
}

std::string format_duration(std::chrono::seconds d) {
    const long long s = d.count();
    if (s % 60 != 0) throw std::invalid_argument("duration is not a whole number of minutes");
    if (s % 86400 == 0) return std::to_string(s / 86400) + "d";
    if (s % 3600 == 0) return std::to_string(s / 3600) + "h";
    return std::to_string(s / 60) + "m";
}

TaskId task_id(const Task& task) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : render_petel(task)) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string format_task_id(TaskId id) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(id));
    return buf;
}

std::optional<TaskId> parse_task_id(std::string_view text) {
    if (text.empty() || text.size() > 16) return std::nullopt;
    TaskId id = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), id, 16);
    if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
    return id;
}

std::string render_literal(const Literal& literal) {
    if (const double* d = std::get_if<double>(&literal)) {
        char buf[64];
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, *d);
        return std::string(buf, ptr);
    }
    std::string out = "'";
    for (char c : std::get<std::string>(literal)) {
        if (c == '\'') out.push_back('\'');
        out.push_back(c);
    }
    out.push_back('\'');
    return out;
}

std::string render_petel(const Task& task) {
    std::string out = "Entity: " + task.entity + "\nFilter: ";
    const auto& f = task.filter;
    if (f.op == FilterOp::All) {
        out += "NONE";
    } else {
        out += op_name(f.op);
        out += "(<";
        out += f.attribute.value_or("");
        if (f.other_attribute) {
            out += ">, <" + *f.other_attribute + ">)";
        } else if (f.threshold) {
            out += ", " + render_literal(*f.threshold) + ">)";
        } else {
            out += ">)";
        }
    }
    out += "\nAggregator: ";
    out += op_name(task.agg.op);
    out += task.agg.attribute ? "(<" + *task.agg.attribute + ">)" : std::string("(None)");
    if (task.params != SearchParams{}) {
        out += "\nParams: window=" + format_duration(task.params.window) +
               ",lead=" + format_duration(task.params.lead) +
               ",history=" + format_duration(task.params.history);
    }
    return out;
}

namespace {

std::string_view comparison_phrase(FilterOp op) {
    switch (op) {
    case FilterOp::Greater: return "greater than";
    case FilterOp::Less: return "less than";
    case FilterOp::Eq: return "equal to";
    case FilterOp::Neq: return "not equal to";
    case FilterOp::All: break;
    }
    return "";
}

std::string bracket(std::string_view name) { return "<" + std::string(name) + ">"; }

} // namespace

std::string render_nl(const Task& task, const Schema& schema) {
    const auto validity = check_validity(task, schema);
    if (!validity.valid) {
        std::string why;
        for (const auto& r : validity.reasons) why += (why.empty() ? "" : ", ") + r;
        throw InvalidTask("cannot describe invalid task (" + why + ")");
    }

    std::string out = "For each " + bracket(task.entity) + " predict ";
    const auto& agg = task.agg;
    const std::string x = agg.attribute ? bracket(*agg.attribute) : std::string();
    switch (agg.op) {
    case AggOp::Count: out += "the number of records"; break;
    case AggOp::Sum: out += "the total " + x; break;
    case AggOp::Avg: out += "the average of " + x; break;
    case AggOp::Min: out += "the minimum " + x; break;
    case AggOp::Max: out += "the maximum " + x; break;
    case AggOp::Majority: out += "the majority of " + x; break;
    }
    if (agg.attribute) out += " in all related records";

    const auto& f = task.filter;
    if (f.op != FilterOp::All) {
        out += " with " + bracket(*f.attribute) + " ";
        out += comparison_phrase(f.op);
        out += " ";
        if (f.other_attribute) out += bracket(*f.other_attribute);
        else if (f.threshold) out += render_literal(*f.threshold);
        else out += "__";
    }
    return out;
}

} // namespace taskgen
