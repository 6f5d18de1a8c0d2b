#include "taskgen/metric_store.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "taskgen/errors.hpp"

namespace taskgen {

nlohmann::json to_json(const MetricRecord& r) {
    nlohmann::json j = {
        {"session", r.session},
        {"task_id", format_task_id(r.task_id)},
        {"petel", r.petel},
        {"status", r.status},
        {"revision", r.revision},
    };
    if (r.promise) j["promise"] = to_json(*r.promise);
    if (r.metrics) j["metrics"] = to_json(*r.metrics);
    if (r.error) j["error"] = *r.error;
    return j;
}

MetricRecord record_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw std::invalid_argument("record is not an object");
    MetricRecord r;
    r.session = j.at("session").get<std::string>();
    auto id = parse_task_id(j.at("task_id").get<std::string>());
    if (!id) throw std::invalid_argument("bad task id");
    r.task_id = *id;
    r.petel = j.at("petel").get<std::string>();
    r.status = j.at("status").get<std::string>();
    r.revision = j.at("revision").get<std::uint64_t>();
    if (auto p = j.find("promise"); p != j.end()) {
        PromiseScore s;
        s.validity = p->at("f_v").get<double>();
        s.preference = p->at("f_p").get<double>();
        s.business = p->at("f_b").get<double>();
        s.examples = p->at("f_e").get<double>();
        s.promise = p->at("promise").get<double>();
        r.promise = s;
    }
    if (auto m = j.find("metrics"); m != j.end()) {
        TaskMetrics t;
        t.accuracy = m->at("f_a").get<double>();
        t.seconds = m->at("f_tau").get<double>();
        t.confidence = m->at("f_c").get<double>();
        t.explainability = m->at("f_x").get<double>();
        r.metrics = t;
    }
    if (auto e = j.find("error"); e != j.end()) r.error = e->get<std::string>();
    return r;
}

const MetricRecord& MetricStore::append(MetricRecord record) {
    record.revision = next_revision_++;
    log_.push_back(std::move(record));
    return log_.back();
}

void MetricStore::restore(MetricRecord record) {
    next_revision_ = std::max(next_revision_, record.revision + 1);
    log_.push_back(std::move(record));
}

std::vector<MetricRecord> MetricStore::view() const {
    std::vector<const MetricRecord*> best;
    best.reserve(log_.size());
    for (const auto& r : log_) best.push_back(&r);
    std::sort(best.begin(), best.end(), [](const MetricRecord* a, const MetricRecord* b) {
        return std::tie(a->session, a->task_id, b->revision) < std::tie(b->session, b->task_id, a->revision);
    });
    std::vector<MetricRecord> out;
    for (const auto* r : best)
        if (out.empty() || out.back().session != r->session || out.back().task_id != r->task_id) out.push_back(*r);
    return out;
}

std::optional<MetricRecord> MetricStore::latest(std::string_view session, TaskId id) const {
    const MetricRecord* best = nullptr;
    for (const auto& r : log_)
        if (r.session == session && r.task_id == id && (!best || r.revision > best->revision)) best = &r;
    if (!best) return std::nullopt;
    return *best;
}

std::string serialize_store(const MetricStore& store) {
    std::string out;
    for (const auto& r : store.log()) {
        out += to_json(r).dump();
        out += '\n';
    }
    return out;
}

void persist_store(const MetricStore& store, const std::filesystem::path& path) {
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw Error("cannot write metric store: " + tmp);
        f << serialize_store(store);
        if (!f) throw Error("cannot write metric store: " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

StoreLoad parse_store(std::string_view jsonl) {
    StoreLoad out;
    std::size_t line_no = 0;
    while (!jsonl.empty()) {
        ++line_no;
        const auto nl = jsonl.find('\n');
        std::string_view line = jsonl.substr(0, nl);
        jsonl.remove_prefix(nl == std::string_view::npos ? jsonl.size() : nl + 1);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
        try {
            out.store.restore(record_from_json(nlohmann::json::parse(line)));
        } catch (const std::exception& e) {
            out.warnings.push_back("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

StoreLoad load_store(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot read metric store: " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_store(ss.str());
}

} // namespace taskgen
