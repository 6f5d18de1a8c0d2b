// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "simulation.hpp"
#include "taskgen/enumeration.hpp"
#include "taskgen/evaluation.hpp"
#include "taskgen/labeling.hpp"
#include "taskgen/models.hpp"
#include "taskgen/pipeline.hpp"
#include "taskgen/recommender.hpp"
#include "taskgen/validity.hpp"

using namespace taskgen;

namespace {

const std::string kData = TASKGEN_DATA_DIR;
const std::string kTests = TASKGEN_TEST_DIR;

struct Outcome {
    bool pass = true;
    std::string detail;
};

Outcome fail(std::string why) { return {false, std::move(why)}; }

Schema flights() { return load_schema(kData + "/flight_delay.schema.json"); }

nlohmann::json fixture() {
    std::ifstream f(kTests + "/fixtures/flight_example_tasks.json");
    return nlohmann::json::parse(f);
}

Outcome nl_golden() {
    const Schema s = flights();
    int exact = 0, total = 0;
    std::string first_miss;
    const auto fx = fixture();
    for (const auto& row : fx["tasks"]) {
        ++total;
        const auto got = render_nl(parse_petel(row["petel"].get<std::string>()), s);
        if (got == row["intermediate"].get<std::string>()) ++exact;
        else if (first_miss.empty()) first_miss = got;
    }
    Outcome o{exact == 5 && total == 5, std::to_string(exact) + "/" + std::to_string(total) + " exact"};
    if (!first_miss.empty()) o.detail += "; got \"" + first_miss + "\"";
    return o;
}

Outcome validity_fixture() {
    const Schema s = flights();
    const auto fx = fixture();
    const Task bad = parse_petel(fx["invalid"].get<std::string>());
    const auto v = check_validity(bad, s);
    if (v.valid) return fail("pair task judged valid");
    if (std::find(v.reasons.begin(), v.reasons.end(), reason::kAttributePair) == v.reasons.end())
        return fail("no attribute-pair reason");
    int valid = 0;
    for (const auto& row : fx["tasks"]) valid += check_validity(parse_petel(row["petel"].get<std::string>()), s).valid;
    return {valid == 5, "invalid task rejected; " + std::to_string(valid) + "/5 example tasks valid"};
}

Outcome enumeration_oracle() {
    auto keys = [](const TaskUniverse& u) {
        std::vector<oracle::TaskKey> k;
        for (const auto& t : u.tasks) k.push_back(oracle::key_of(t));
        std::sort(k.begin(), k.end());
        return k;
    };
    auto check = [&](const Schema& s, const OpConfig& c) -> std::optional<std::string> {
        auto want = oracle::brute_force_tasks(s, c);
        std::sort(want.begin(), want.end());
        if (count_tasks(s, c) != want.size()) return "count mismatch on " + s.name();
        const auto u = enumerate_tasks(s, c);
        if (keys(u) != want) return "task set mismatch on " + s.name();
        for (const auto& t : u.tasks) {
            if (t.filter.attribute && !oracle::filter_allows(t.filter.op, *s.kind_of(*t.filter.attribute)))
                return "filter typing violation";
            if (t.agg.attribute && !oracle::agg_allows(t.agg.op, *s.kind_of(*t.agg.attribute)))
                return "aggregator typing violation";
        }
        return std::nullopt;
    };
    const Schema f = flights();
    if (auto e = check(f, OpConfig{})) return fail(*e);
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 100; ++i) {
        const Schema s = oracle::random_schema(rng, 8, i);
        if (auto e = check(s, oracle::random_ops(rng))) return fail(*e);
    }
    return {true, "flights N=" + std::to_string(count_tasks(f, OpConfig{})) + " and 100 fuzzed schemas exact"};
}

Dataset perturbed(const Dataset& base, const std::function<bool(std::size_t)>& touch) {
    const Schema& s = base.schema();
    std::vector<RowInput> rows;
    for (std::size_t r = 0; r < base.rows(); ++r) {
        RowInput ri{base.time(r), std::vector<std::optional<std::string>>(s.attributes().size())};
        for (std::size_t a = 1; a < s.attributes().size(); ++a) {
            const auto& col = base.column(a);
            if (!col.has(r)) continue;
            ri.cells[a] = col.kind == AttributeKind::Numerical ? std::to_string(col.numbers[r]) : col.text[r];
        }
        if (touch(r)) {
            ri.cells[*s.index_of("C")] = "z";
            ri.cells[*s.index_of("X")] = "1000";
            ri.cells[*s.index_of("Y")] = "-1000";
        }
        rows.push_back(ri);
    }
    return Dataset::from_rows(s, rows);
}

Outcome labeling_oracle() {
    const Dataset ds = oracle::synthetic_dataset(200, 12, 11);
    const std::vector<FilterExpr> filters{
        {FilterOp::All, std::nullopt, std::nullopt, std::nullopt},
        {FilterOp::Greater, "X", std::nullopt, Literal(10.0)},
        {FilterOp::Less, "X", std::nullopt, Literal(9.5)},
        {FilterOp::Eq, "C", std::nullopt, Literal(std::string("y"))},
        {FilterOp::Neq, "C", std::nullopt, Literal(std::string("x"))},
    };
    const std::vector<AggExpr> aggs{{AggOp::Count, std::nullopt}, {AggOp::Sum, "Y"}, {AggOp::Avg, "Y"},
                                    {AggOp::Min, "Y"},            {AggOp::Max, "Y"}, {AggOp::Majority, "C"}};
    SearchParams hourly;
    hourly.window = std::chrono::hours(6);
    hourly.lead = std::chrono::hours(3);
    std::size_t labels = 0;
    for (const auto& p : {SearchParams{}, hourly})
        for (const auto& f : filters)
            for (const auto& a : aggs) {
                const Task t{"E", f, a, p};
                for (const auto& c : generate_cutoffs(ds, t)) {
                    if (compute_label(t, ds, c) != oracle::scan_label(t, ds, c))
                        return fail("label mismatch for " + render_petel(t));
                    ++labels;
                }
            }

    std::size_t probes = 0;
    for (const auto& p : {SearchParams{}, hourly})
        for (const auto& a : aggs) {
            const Task t{"E", filters[1], a, p};
            const auto ts = build_training_set(t, ds);
            for (std::size_t i = 0; i < ts.examples.size(); i += 3) {
                const auto& e = ts.examples[i];
                const Dataset edited = perturbed(ds, [&](std::size_t r) {
                    return ds.time(r) < e.label_begin || ds.time(r) >= e.label_end;
                });
                if (compute_label(t, edited, e.cutoff) != std::optional<Label>(e.label))
                    return fail("out-of-window edit changed a label of " + render_petel(t));
                ++probes;
            }
        }
    return {true, std::to_string(labels) + " labels match the scan oracle; " + std::to_string(probes) +
                      " leakage probes unchanged"};
}

Task delay_task(const char* agg) {
    return parse_petel(std::string("Entity: AIRLINE\nFilter: NONE\nAggregator: ") + agg);
}

Outcome diversity_ordering() {
    const Task t1 = delay_task("max_agg(<WEATHER_DELAY>)");
    const Task t2 = delay_task("avg_agg(<WEATHER_DELAY>)");
    const Task t3 = delay_task("avg_agg(<SECURITY_DELAY>)");
    const Task t4 = delay_task("sum_agg(<SECURITY_DELAY>)");
    const double d12 = diversity(t1, t2), d13 = diversity(t1, t3), d23 = diversity(t2, t3), d24 = diversity(t2, t4);
    std::ostringstream os;
    os.precision(4);
    os << "div13=" << d13 << " > div12=" << d12 << "; div23=" << d23 << " < div24=" << d24;
    return {d13 > d12 && d23 < d24, os.str()};
}

Outcome feedback_properties() {
    std::mt19937_64 rng(2024);
    const auto pool = sim::make_pool(7, 500);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int i = 0; i < 10000; ++i) {
        std::array<double, kFeatureDim> w{};
        for (double& x : w) x = u(rng);
        const RankingModel m(w, 0.01 + 0.5 * (u(rng) + 1));
        const auto& x = pool.items[rng() % pool.items.size()];
        const bool useful = rng() % 2;
        const auto after = apply_feedback(m, x, {1, useful ? Verdict::Useful : Verdict::NotUseful, 0});
        const double a = after.preference(x), b = m.preference(x);
        if (useful ? !(a > b) : !(a < b)) return fail("monotonicity broken at triple " + std::to_string(i));
    }

    const auto target = sim::make_pool(100, 2000);
    const auto source = sim::make_pool(107, 2000);
    const auto hidden = sim::make_oracle(1, target);
    sim::Protocol p;
    p.judge = sim::Judge::Slate;
    const auto cold = sim::run(RankingModel{}, hidden, target, p, 1);
    const double best = *std::max_element(cold.agreement.begin(), cold.agreement.end());
    sim::Protocol pre = p;
    pre.rounds = 300;
    const auto trained = sim::run(RankingModel{}, hidden, source, pre, 1001);
    const auto warm = sim::run(import_model_text(export_model(trained.model).dump()), hidden, target, p, 1);

    std::ostringstream os;
    os.precision(3);
    os << "10000 triples monotone; cold top-1 " << cold.agreement.back() << " (max " << best << ", 0.9 after "
       << cold.rounds_to_target << " rounds); warm 0.9 after " << warm.rounds_to_target << " rounds";
    const bool ok = cold.rounds_to_target <= p.rounds && warm.rounds_to_target < cold.rounds_to_target;
    return {ok, os.str()};
}

Outcome baseline_numerics() {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g(0, 1);
    const std::vector<double> beta{1.5, -2.0, 0.25, 4.0, -0.5};
    std::vector<Sample> s;
    for (int i = 0; i < 200; ++i) {
        std::vector<double> x(beta.size());
        double y = 3.0;
        for (std::size_t j = 0; j < x.size(); ++j) y += beta[j] * (x[j] = 3 * g(rng));
        s.push_back({x, Label(y)});
    }
    const auto rm_fit = fit(ModelKind::RidgeLinear, s);
    const auto& rm = std::get<RidgeModel>(rm_fit.state());
    double worst = 0;
    for (std::size_t j = 0; j < beta.size(); ++j)
        worst = std::max(worst, std::abs(rm.coefficients[j] - beta[j]) / std::abs(beta[j]));
    if (worst > 1e-3) return fail("ridge relative error " + std::to_string(worst));

    std::normal_distribution<double> wide(50, 20);
    std::vector<Sample> c;
    for (int i = 0; i < 97; ++i) c.push_back({{0.0}, Label(wide(rng))});
    const auto cm = fit(ModelKind::ConstantBaseline, c);
    std::vector<Label> truth, pred;
    for (const auto& x : c) {
        truth.push_back(x.y);
        pred.push_back(cm.predict(x.x));
    }
    const double r2 = raw_score(truth, pred, LabelType::Numeric);
    if (r2 != 0.0) return fail("constant R^2 = " + std::to_string(r2));

    std::mt19937_64 coin_rng(31);
    std::bernoulli_distribution right(0.7);
    std::vector<Label> t, p;
    for (int i = 0; i < 200; ++i) {
        t.emplace_back(std::string("a"));
        p.emplace_back(std::string(right(coin_rng) ? "a" : "b"));
    }
    std::vector<double> widths;
    for (std::size_t n : {200u, 50u, 12u})
        widths.push_back(bootstrap_interval(std::span<const Label>(t.data(), n), std::span<const Label>(p.data(), n),
                                            LabelType::Categorical, 200, 0.9, 42)
                             .width());
    std::ostringstream os;
    os.precision(3);
    os << "ridge max rel err " << worst << "; constant R^2 " << r2 << "; CI widths " << widths[0] << " < "
       << widths[1] << " < " << widths[2];
    return {widths[0] < widths[1] && widths[1] < widths[2], os.str()};
}

Outcome determinism() {
    const auto loaded = load_dataset(kData + "/toy_flights.csv", load_schema(kData + "/toy_flights.schema.json"));
    MetricStore a, b;
    const PipelineConfig config;
    const auto ra = run_pipeline(loaded.dataset, config, RankingModel{}, a, "acceptance");
    const auto rb = run_pipeline(loaded.dataset, config, RankingModel{}, b, "acceptance");
    const auto ja = recommendations_json(ra.recommendations).dump();
    const auto jb = recommendations_json(rb.recommendations).dump();
    const auto sa = serialize_store(a), sb = serialize_store(b);
    return {ja == jb && sa == sb && !ra.recommendations.empty(),
            std::to_string(ja.size()) + " bytes of recommendations, " + std::to_string(sa.size()) +
                " bytes of store, identical"};
}

} // namespace

int main() {
    struct Criterion {
        const char* name;
        double limit;
        Outcome (*run)();
    };
    const Criterion criteria[] = {
        {"nl_golden", 1, nl_golden},
        {"validity_fixture", 1, validity_fixture},
        {"enumeration_oracle", 10, enumeration_oracle},
        {"labeling_oracle", 30, labeling_oracle},
        {"diversity_ordering", 1, diversity_ordering},
        {"feedback_properties", 60, feedback_properties},
        {"baseline_numerics", 30, baseline_numerics},
        {"end_to_end_determinism", 60, determinism},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = fail(std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (secs >= c.limit) {
            o.pass = false;
            o.detail += "; over the time limit";
        }
        failed += !o.pass;
        std::printf("%s %s (%.3f s, limit %.0f s): %s\n", o.pass ? "PASS" : "FAIL", c.name, secs, c.limit,
                    o.detail.c_str());
        std::fflush(stdout);
    }
    return failed ? 1 : 0;
}
