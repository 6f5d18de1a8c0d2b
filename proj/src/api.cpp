#include "taskgen/api.hpp"

#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <vector>

#include "taskgen/dataset.hpp"
#include "taskgen/errors.hpp"
#include "taskgen/pipeline.hpp"

namespace taskgen {

struct Api::Session {
    std::string id;
    std::mutex writer;
    mutable std::shared_mutex state;

    Dataset dataset;
    PipelineConfig config;
    RankingModel model;
    MetricStore store;
    std::optional<PipelineResult> result;
    bool stale = false;
};

namespace {

using json = nlohmann::json;

ApiResponse error(int status, std::string_view name, std::string_view message = {}) {
    json body = {{"error", name}};
    if (!message.empty()) body["message"] = message;
    return {status, std::move(body)};
}

std::string error_name(const std::exception& e) {
#define TASKGEN_NAME(T) \
    if (dynamic_cast<const T*>(&e)) return #T;
    TASKGEN_NAME(CsvError)
    TASKGEN_NAME(SchemaError)
    TASKGEN_NAME(MissingColumn)
    TASKGEN_NAME(NoTimeColumn)
    TASKGEN_NAME(EmptyDataset)
    TASKGEN_NAME(UnknownAttribute)
    TASKGEN_NAME(ParseError)
    TASKGEN_NAME(UnknownOperator)
    TASKGEN_NAME(InvalidTask)
    TASKGEN_NAME(NoEntityAttribute)
    TASKGEN_NAME(NoDataForAttribute)
    TASKGEN_NAME(WindowExceedsSpan)
    TASKGEN_NAME(UnresolvedThreshold)
    TASKGEN_NAME(EmptyTrainingSet)
    TASKGEN_NAME(LabelTypeMismatch)
    TASKGEN_NAME(MissingMetrics)
    TASKGEN_NAME(VersionError)
    TASKGEN_NAME(CorruptBlob)
#undef TASKGEN_NAME
    if (dynamic_cast<const std::invalid_argument*>(&e)) return "InvalidArgument";
    if (dynamic_cast<const json::exception*>(&e)) return "BadJson";
    return "Error";
}

std::vector<std::string_view> split_path(std::string_view path) {
    std::vector<std::string_view> out;
    while (!path.empty()) {
        const auto slash = path.find('/');
        const auto part = path.substr(0, slash);
        if (!part.empty()) out.push_back(part);
        if (slash == std::string_view::npos) break;
        path.remove_prefix(slash + 1);
    }
    return out;
}

json parse_body(const std::string& body) {
    if (body.find_first_not_of(" \t\r\n") == std::string::npos) return json::object();
    return json::parse(body);
}

json result_summary(const PipelineResult& r) {
    return {{"universe_size", r.universe_size},         {"valid_count", r.valid_count},
            {"families_selected", r.families_selected}, {"candidates", r.candidates},
            {"evaluated_count", r.evaluated_count},     {"failed_count", r.failed_count}};
}

const EvaluatedTask* find_evaluated(const PipelineResult& r, TaskId id) {
    for (const auto& e : r.evaluated)
        if (e.id == id) return &e;
    return nullptr;
}

json params_json(const SearchParams& p) {
    return {{"window", format_duration(p.window)},
            {"lead", format_duration(p.lead)},
            {"history", format_duration(p.history)}};
}

} // namespace

Api::Api() = default;
Api::~Api() = default;

std::shared_ptr<Api::Session> Api::find(std::string_view id) {
    std::lock_guard lock(registry_mu_);
    auto it = sessions_.find(id);
    return it == sessions_.end() ? nullptr : it->second;
}

std::unique_lock<std::mutex> Api::hold_writer(std::string_view session_id) {
    auto s = find(session_id);
    if (!s) return {};
    return std::unique_lock(s->writer);
}

ApiResponse Api::handle(const ApiRequest& req) {
    try {
        const auto parts = split_path(req.path);
        if (parts.empty() || parts[0] != "sessions") return error(404, "NotFound");
        if (parts.size() == 1) {
            if (req.method != "POST") return error(405, "MethodNotAllowed");
            return create_session(req);
        }
        auto session = find(parts[1]);
        if (!session) return error(404, "NoSession");
        Session& s = *session;
        const auto route = [&](std::initializer_list<std::string_view> tail, std::string_view method) {
            if (parts.size() != 2 + tail.size() || req.method != method) return false;
            std::size_t i = 2;
            for (auto t : tail) {
                if (t != "*" && parts[i] != t) return false;
                ++i;
            }
            return true;
        };
        if (route({"run"}, "POST")) return run(s);
        if (route({"recommendations"}, "GET")) return recommendations(s, req);
        if (route({"feedback"}, "POST")) return feedback(s, req);
        if (route({"tasks", "*"}, "GET")) return task_detail(s, parts[3], false);
        if (route({"tasks", "*", "nl"}, "GET")) return task_detail(s, parts[3], true);
        if (route({"params"}, "POST")) return set_params(s, req);
        if (route({"model", "export"}, "GET")) return export_blob(s);
        if (route({"model", "import"}, "POST")) return import_blob(s, req);
        return error(404, "NotFound");
    } catch (const std::exception& e) {
        return error(400, error_name(e), e.what());
    }
}

ApiResponse Api::create_session(const ApiRequest& req) {
    const json body = parse_body(req.body);
    if (!body.is_object()) return error(400, "BadRequest", "body must be a JSON object");

    std::optional<Schema> schema;
    if (auto it = body.find("schema"); it != body.end()) schema = schema_from_json(*it);
    else if (auto p = body.find("schema_path"); p != body.end()) schema = load_schema(p->get<std::string>());

    LoadResult loaded;
    if (auto it = body.find("csv_text"); it != body.end()) {
        const auto text = it->get<std::string>();
        if (!schema) schema = infer_schema_from_string(text);
        loaded = load_dataset_from_string(text, *schema);
    } else if (auto p = body.find("csv"); p != body.end()) {
        const auto path = p->get<std::string>();
        if (!schema) schema = infer_schema(path);
        loaded = load_dataset(path, *schema);
    } else {
        return error(400, "BadRequest", "csv or csv_text is required");
    }

    auto s = std::make_shared<Session>();
    s->dataset = std::move(loaded.dataset);
    if (auto c = body.find("config"); c != body.end()) s->config = config_from_json(*c);
    s->config.validate();
    if (auto e = body.find("eta"); e != body.end()) s->model = RankingModel(e->get<double>());

    {
        std::lock_guard lock(registry_mu_);
        s->id = "s" + std::to_string(next_session_++);
        sessions_.emplace(s->id, s);
    }
    return {201,
            {{"session_id", s->id},
             {"rows_read", loaded.report.rows_read},
             {"rows_loaded", loaded.report.rows_loaded},
             {"dropped", loaded.report.dropped},
             {"schema", schema_to_json(s->dataset.schema())}}};
}

ApiResponse Api::run(Session& s) {
    std::unique_lock writer(s.writer, std::try_to_lock);
    if (!writer) return error(409, "Busy");
    PipelineConfig config;
    RankingModel model;
    MetricStore store;
    {
        std::shared_lock read(s.state);
        config = s.config;
        model = s.model;
        store = s.store;
    }
    PipelineResult result = run_pipeline(s.dataset, config, model, store, s.id);
    json out = result_summary(result);
    out["recommendations"] = recommendations_json(result.recommendations);
    std::unique_lock write(s.state);
    s.store = std::move(store);
    s.result = std::move(result);
    s.stale = false;
    return {200, std::move(out)};
}

ApiResponse Api::recommendations(Session& s, const ApiRequest& req) {
    std::shared_lock read(s.state);
    if (!s.result) return error(404, "NoRecommendations", "run the session first");
    std::size_t k = s.config.k;
    double lambda = s.config.lambda;
    if (auto it = req.query.find("k"); it != req.query.end()) {
        const long v = std::stol(it->second);
        if (v < 1) return error(400, "InvalidArgument", "k must be >= 1");
        k = static_cast<std::size_t>(v);
    }
    if (auto it = req.query.find("lambda"); it != req.query.end()) {
        lambda = std::stod(it->second);
        if (!(lambda >= 0 && lambda <= 1)) return error(400, "InvalidArgument", "lambda must lie in [0, 1]");
    }
    const auto recs =
        recommend(s.result->evaluated, s.dataset.schema(), s.model, s.config.utility_weights, k, lambda);
    return {200, {{"recommendations", recommendations_json(recs)}, {"stale", s.stale}}};
}

ApiResponse Api::feedback(Session& s, const ApiRequest& req) {
    const json body = parse_body(req.body);
    const auto id = parse_task_id(body.at("task_id").get<std::string>());
    const auto verdict = verdict_from_string(body.at("verdict").get<std::string>());
    if (!id) return error(400, "InvalidArgument", "bad task_id");
    if (!verdict) return error(400, "InvalidArgument", "verdict must be useful or not_useful");

    std::unique_lock writer(s.writer, std::try_to_lock);
    if (!writer) return error(409, "Busy");
    std::unique_lock write(s.state);
    if (!s.result) return error(404, "NoRecommendations", "run the session first");
    const EvaluatedTask* task = find_evaluated(*s.result, *id);
    if (!task) return error(404, "UnknownTask");
    const auto before = s.model.preference(task->features);
    const FeedbackEvent event{*id, *verdict, static_cast<std::int64_t>(s.model.feedback_count() + 1)};
    s.model = apply_feedback(std::move(s.model), task->features, event);
    const auto recs = recommend(s.result->evaluated, s.dataset.schema(), s.model, s.config.utility_weights,
                                s.config.k, s.config.lambda);
    return {200,
            {{"task_id", format_task_id(*id)},
             {"f_p_before", before},
             {"f_p_after", s.model.preference(task->features)},
             {"feedback_count", s.model.feedback_count()},
             {"recommendations", recommendations_json(recs)}}};
}

ApiResponse Api::task_detail(Session& s, std::string_view tid, bool nl_only) {
    const auto id = parse_task_id(tid);
    if (!id) return error(400, "InvalidArgument", "bad task id");
    std::shared_lock read(s.state);
    const Schema& schema = s.dataset.schema();
    if (s.result) {
        if (const EvaluatedTask* e = find_evaluated(*s.result, *id)) {
            const auto nl = render_nl(e->task, schema);
            if (nl_only) return {200, {{"task_id", format_task_id(*id)}, {"nl", nl}}};
            const auto comps = utility_inputs(e->features, s.model, e->business);
            const auto& d = e->evaluation.diagnostics;
            return {200,
                    {{"task_id", format_task_id(*id)},
                     {"petel", render_petel(e->task)},
                     {"nl", nl},
                     {"status", status::kEvaluated},
                     {"promise", to_json(e->promise)},
                     {"metrics", to_json(e->evaluation.metrics)},
                     {"utility", utility(comps, s.config.utility_weights)},
                     {"diagnostics",
                      {{"best_kind", to_string(d.best_kind)},
                       {"raw_score", d.raw_score},
                       {"leave_one_out", d.leave_one_out},
                       {"n_train", d.n_train},
                       {"n_test", d.n_test},
                       {"ci_low", d.ci_low},
                       {"ci_high", d.ci_high}}},
                     {"n_examples", e->sufficiency.n_examples}}};
        }
    }
    const auto rec = s.store.latest(s.id, *id);
    if (!rec) return error(404, "UnknownTask");
    const Task task = parse_petel(rec->petel);
    std::optional<std::string> nl;
    try {
        nl = render_nl(task, schema);
    } catch (const InvalidTask&) {
    }
    if (nl_only) {
        if (!nl) return error(422, "InvalidTask", "invalid tasks have no description");
        return {200, {{"task_id", format_task_id(*id)}, {"nl", *nl}}};
    }
    json out = to_json(*rec);
    if (nl) out["nl"] = *nl;
    return {200, std::move(out)};
}

ApiResponse Api::set_params(Session& s, const ApiRequest& req) {
    const json body = parse_body(req.body);
    std::unique_lock writer(s.writer, std::try_to_lock);
    if (!writer) return error(409, "Busy");
    std::unique_lock write(s.state);
    SearchParams p = s.config.ops.params;
    if (auto it = body.find("window"); it != body.end()) p.window = parse_duration(it->get<std::string>());
    if (auto it = body.find("lead"); it != body.end()) p.lead = parse_duration(it->get<std::string>());
    if (auto it = body.find("history"); it != body.end()) p.history = parse_duration(it->get<std::string>());
    check_params(p);
    if (!(p == s.config.ops.params)) {
        s.config.ops.params = p;
        s.stale = s.result.has_value();
    }
    return {200, {{"params", params_json(p)}, {"stale", s.stale}}};
}

ApiResponse Api::export_blob(Session& s) {
    std::shared_lock read(s.state);
    return {200, export_model(s.model)};
}

ApiResponse Api::import_blob(Session& s, const ApiRequest& req) {
    const json body = parse_body(req.body);
    std::optional<double> eta;
    json blob = body;
    if (auto it = body.find("blob"); it != body.end()) {
        blob = it->is_string() ? json::parse(it->get<std::string>()) : *it;
        if (auto e = body.find("eta"); e != body.end() && !e->is_null()) eta = e->get<double>();
    }
    RankingModel model = import_model(blob, eta);
    std::unique_lock writer(s.writer, std::try_to_lock);
    if (!writer) return error(409, "Busy");
    std::unique_lock write(s.state);
    s.model = std::move(model);
    return {200, {{"feedback_count", s.model.feedback_count()}, {"eta", s.model.eta()}}};
}

} // namespace taskgen
