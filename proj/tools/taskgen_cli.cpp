// taskgen command-line front end.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "taskgen/api.hpp"
#include "taskgen/dataset.hpp"
#include "taskgen/enumeration.hpp"
#include "taskgen/errors.hpp"
#include "taskgen/evaluation.hpp"
#include "taskgen/labeling.hpp"
#include "taskgen/metric_store.hpp"
#include "taskgen/pipeline.hpp"
#include "taskgen/ranking_model.hpp"
#include "taskgen/validity.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace taskgen;

namespace {

struct Common {
    std::string data;
    std::string schema;
    std::string config;
    std::optional<std::size_t> m, k;
    std::optional<double> lambda;
    std::optional<std::string> window, lead, history;
    std::optional<std::uint64_t> seed;
    std::string store;
    std::string model;
    bool measured = false;
};

void add_data(CLI::App* app, Common& c) {
    app->add_option("--data", c.data, "Event table (CSV)")->required()->check(CLI::ExistingFile);
    app->add_option("--schema", c.schema, "Schema sidecar (JSON); inferred if omitted")->check(CLI::ExistingFile);
}

void add_params(CLI::App* app, Common& c) {
    app->add_option("--window", c.window, "Prediction window, e.g. 1d, 6h");
    app->add_option("--lead", c.lead, "Lead time between cutoff and window");
    app->add_option("--history", c.history, "Feature history length");
}

void add_pipeline(CLI::App* app, Common& c) {
    add_data(app, c);
    add_params(app, c);
    app->add_option("--config", c.config, "Pipeline config (JSON)")->check(CLI::ExistingFile);
    app->add_option("--m", c.m, "Promising tasks to evaluate");
    app->add_option("--k", c.k, "Recommendations to return");
    app->add_option("--lambda", c.lambda, "Relevance/diversity trade-off in [0, 1]");
    app->add_option("--seed", c.seed, "Pipeline seed");
    app->add_option("--store", c.store, "Metric store (JSONL), loaded and appended");
    app->add_option("--model", c.model, "Ranker blob (JSON), loaded if present");
    app->add_flag("--measured-time", c.measured, "Use wall-clock fit time for f'_tau");
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot read " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot write " + path);
    f << text;
}

Schema schema_of(const Common& c) { return c.schema.empty() ? infer_schema(c.data) : load_schema(c.schema); }

Dataset dataset_of(const Common& c) {
    auto loaded = load_dataset(c.data, schema_of(c));
    if (loaded.report.dropped)
        std::cerr << "warning: dropped " << loaded.report.dropped << " rows with unparseable time\n";
    return std::move(loaded.dataset);
}

PipelineConfig config_of(const Common& c) {
    PipelineConfig cfg;
    if (!c.config.empty()) cfg = config_from_json(json::parse(read_file(c.config)), cfg);
    if (c.m) cfg.m = *c.m;
    if (c.k) cfg.k = *c.k;
    if (c.lambda) cfg.lambda = *c.lambda;
    if (c.seed) cfg.seed = *c.seed;
    if (c.window) cfg.ops.params.window = parse_duration(*c.window);
    if (c.lead) cfg.ops.params.lead = parse_duration(*c.lead);
    if (c.history) cfg.ops.params.history = parse_duration(*c.history);
    if (c.measured) cfg.evaluation.timing = TimingMode::Measured;
    check_params(cfg.ops.params);
    cfg.validate();
    return cfg;
}

RankingModel model_of(const Common& c) {
    if (c.model.empty() || !fs::exists(c.model)) return RankingModel{};
    return import_model_text(read_file(c.model));
}

MetricStore store_of(const Common& c) {
    if (c.store.empty() || !fs::exists(c.store)) return {};
    auto loaded = load_store(c.store);
    for (const auto& w : loaded.warnings) std::cerr << "warning: store " << w << "\n";
    return std::move(loaded.store);
}

Task task_of(const std::string& text, const std::string& file, const SearchParams& params, bool params_given) {
    Task t = parse_petel(file.empty() ? text : read_file(file));
    if (params_given) t.params = params;
    return t;
}

void print_table(const std::vector<Recommendation>& recs) {
    std::printf("%-4s  %-8s  %-16s  %s\n", "rank", "utility", "task_id", "description");
    for (std::size_t i = 0; i < recs.size(); ++i) {
        const auto& r = recs[i];
        std::printf("%-4zu  %-8.4f  %-16s  %s\n", i + 1, r.utility, format_task_id(r.id).c_str(), r.nl.c_str());
        std::string petel = r.petel;
        for (auto& ch : petel)
            if (ch == '\n') ch = ';';
        std::printf("%-4s  %-8s  %-16s  %s\n", "", "", "", petel.c_str());
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Prediction task generation and recommendation over event tables"};
    app.failure_message(CLI::FailureMessage::help);
    app.require_subcommand(1);
    Common c;

    auto* ingest = app.add_subcommand("ingest", "Load a table and report its shape and missing values");
    add_data(ingest, c);
    std::string schema_out;
    ingest->add_option("--schema-out", schema_out, "Write the (inferred) schema here");

    auto* enumerate = app.add_subcommand("enumerate", "Enumerate the task universe");
    add_data(enumerate, c);
    add_params(enumerate, c);
    bool count_only = false;
    std::string out;
    enumerate->add_flag("--count-only", count_only, "Print only the universe size");
    enumerate->add_option("--out", out, "Write tasks as JSONL");

    std::string petel, petel_file;
    auto add_task = [&](CLI::App* sub) {
        auto* g = sub->add_option_group("task");
        g->add_option("--task", petel, "PeTEL text");
        g->add_option("--task-file", petel_file, "PeTEL file")->check(CLI::ExistingFile);
        g->require_option(1);
    };

    auto* engineer = app.add_subcommand("engineer", "Build a task's labeled training set");
    add_data(engineer, c);
    add_params(engineer, c);
    add_task(engineer);
    engineer->add_option("--out", out, "Write the training set CSV here (manifest goes to <out>.json)");

    auto* evaluate = app.add_subcommand("evaluate", "Evaluate a task with the baseline models");
    add_data(evaluate, c);
    add_params(evaluate, c);
    add_task(evaluate);
    std::optional<std::uint64_t> eval_seed;
    evaluate->add_option("--seed", eval_seed, "Bootstrap seed");

    auto* rec = app.add_subcommand("recommend", "Run the pipeline and print the top-K tasks");
    add_pipeline(rec, c);
    bool as_json = false;
    rec->add_flag("--json", as_json, "Print recommendations as JSON");

    auto* fb = app.add_subcommand("feedback", "Apply a useful/not_useful verdict and re-rank");
    add_pipeline(fb, c);
    std::string fb_task, fb_verdict;
    std::optional<double> eta;
    fb->add_option("--task-id", fb_task, "Task id (16 hex digits)")->required();
    fb->add_option("--verdict", fb_verdict, "useful or not_useful")
        ->required()
        ->check(CLI::IsMember({"useful", "not_useful"}));
    fb->add_option("--eta", eta, "Learning rate for a new model");

    auto* serve = app.add_subcommand("serve", "Serve the HTTP API");
    std::string host = "127.0.0.1";
    int port = 8080;
    serve->add_option("--host", host, "Bind address");
    serve->add_option("--port", port, "Port (0 picks one)");

    auto* exp = app.add_subcommand("export-model", "Print a ranker blob");
    exp->add_option("--model", c.model, "Ranker blob to export")->required()->check(CLI::ExistingFile);
    exp->add_option("--out", out, "Write here instead of stdout");

    auto* imp = app.add_subcommand("import-model", "Validate a ranker blob and install it as the model");
    std::string blob;
    imp->add_option("--blob", blob, "Exported blob")->required()->check(CLI::ExistingFile);
    imp->add_option("--model", c.model, "Destination model file")->required();
    imp->add_option("--eta", eta, "Override the learning rate");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const bool params_given = c.window || c.lead || c.history;
        SearchParams params;
        if (c.window) params.window = parse_duration(*c.window);
        if (c.lead) params.lead = parse_duration(*c.lead);
        if (c.history) params.history = parse_duration(*c.history);
        check_params(params);

        if (ingest->parsed()) {
            const Schema schema = schema_of(c);
            const auto loaded = load_dataset(c.data, schema);
            const auto report = validate_dataset(loaded.dataset);
            json j = {{"rows_read", loaded.report.rows_read},
                      {"rows_loaded", loaded.report.rows_loaded},
                      {"dropped", loaded.report.dropped},
                      {"numeric_failures", loaded.report.numeric_failures},
                      {"min_time", format_time(report.min_time, schema.time_format())},
                      {"max_time", format_time(report.max_time, schema.time_format())},
                      {"span_seconds", report.span_seconds},
                      {"missing_rate", report.missing_rate},
                      {"flagged", report.flagged},
                      {"schema", schema_to_json(schema)}};
            if (!schema_out.empty()) write_file(schema_out, schema_to_json(schema).dump(2) + "\n");
            std::cout << j.dump(2) << "\n";
        } else if (enumerate->parsed()) {
            OpConfig ops;
            ops.params = params;
            const Schema schema = schema_of(c);
            if (count_only) {
                std::cout << count_tasks(schema, ops) << "\n";
                return 0;
            }
            const auto universe = enumerate_tasks(schema, ops);
            std::size_t valid = 0;
            for (const auto& t : universe.tasks) valid += check_validity(t, schema).valid;
            if (!out.empty()) write_file(out, export_universe_jsonl(universe));
            else std::cout << export_universe_jsonl(universe);
            std::cerr << universe.size() << " tasks, " << valid << " valid\n";
        } else if (engineer->parsed()) {
            const Dataset ds = dataset_of(c);
            const Task task = task_of(petel, petel_file, params, params_given);
            const auto validity = check_validity(task, ds.schema());
            if (!validity.valid) throw InvalidTask("invalid task: " + validity.reasons.front());
            const auto ts = build_training_set(task, ds);
            auto manifest = training_set_manifest(ts);
            manifest["sufficiency"] = assess_sufficiency(ts).score;
            if (out.empty()) {
                std::cout << training_set_csv(ts);
            } else {
                write_file(out, training_set_csv(ts));
                write_file(out + ".json", manifest.dump(2) + "\n");
            }
            std::cerr << ts.examples.size() << " examples, " << ts.skipped << " cutoffs skipped\n";
        } else if (evaluate->parsed()) {
            const Dataset ds = dataset_of(c);
            const Task task = task_of(petel, petel_file, params, params_given);
            const auto validity = check_validity(task, ds.schema());
            if (!validity.valid) throw InvalidTask("invalid task: " + validity.reasons.front());
            const auto ts = build_training_set(task, ds);
            EvaluationOptions opts;
            opts.seed = mix_seed(eval_seed.value_or(42), task_id(task));
            const auto ev = evaluate_task(task, ts, ds, opts);
            const auto& d = ev.diagnostics;
            json j = to_json(ev.metrics);
            j["task_id"] = format_task_id(task_id(task));
            j["best_kind"] = to_string(d.best_kind);
            j["raw_score"] = d.raw_score;
            j["leave_one_out"] = d.leave_one_out;
            j["n_train"] = d.n_train;
            j["n_test"] = d.n_test;
            j["ci"] = {d.ci_low, d.ci_high};
            std::cout << j.dump(2) << "\n";
        } else if (rec->parsed() || fb->parsed()) {
            const Dataset ds = dataset_of(c);
            const PipelineConfig cfg = config_of(c);
            RankingModel model = model_of(c);
            if (fb->parsed() && eta && (c.model.empty() || !fs::exists(c.model))) model = RankingModel(*eta);
            MetricStore store = store_of(c);
            const std::string session = c.store.empty() ? "cli" : fs::path(c.data).stem().string();
            const auto result = run_pipeline(ds, cfg, model, store, session);
            std::vector<Recommendation> recs = result.recommendations;
            if (fb->parsed()) {
                const auto id = parse_task_id(fb_task);
                if (!id) throw std::invalid_argument("bad task id: " + fb_task);
                const EvaluatedTask* hit = nullptr;
                for (const auto& e : result.evaluated)
                    if (e.id == *id) hit = &e;
                if (!hit) throw Error("task " + fb_task + " was not evaluated in this run");
                const FeedbackEvent ev{*id, *verdict_from_string(fb_verdict),
                                       static_cast<std::int64_t>(model.feedback_count() + 1)};
                model = apply_feedback(std::move(model), hit->features, ev);
                recs = recommend(result.evaluated, ds.schema(), model, cfg.utility_weights, cfg.k, cfg.lambda);
                if (!c.model.empty()) write_file(c.model, export_model(model).dump() + "\n");
            }
            if (!c.store.empty()) persist_store(store, c.store);
            if (as_json) std::cout << recommendations_json(recs).dump(2) << "\n";
            else print_table(recs);
            std::cerr << "N=" << result.universe_size << " valid=" << result.valid_count
                      << " evaluated=" << result.evaluated_count << " failed=" << result.failed_count << "\n";
        } else if (serve->parsed()) {
            Api api;
            HttpServer server(api);
            const int bound = server.bind(host, port);
            if (bound < 0) throw Error("cannot bind " + host + ":" + std::to_string(port));
            std::cerr << "listening on http://" << host << ":" << bound << "\n";
            server.listen();
        } else if (exp->parsed()) {
            const auto text = export_model(import_model_text(read_file(c.model))).dump(2) + "\n";
            if (out.empty()) std::cout << text;
            else write_file(out, text);
        } else if (imp->parsed()) {
            const auto model = import_model_text(read_file(blob), eta);
            write_file(c.model, export_model(model).dump() + "\n");
            std::cerr << "imported ranker with " << model.feedback_count() << " prior feedback events\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
