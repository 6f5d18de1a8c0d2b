#include <doctest.h>

#include <cmath>
#include <random>

#include "simulation.hpp"
#include "taskgen/errors.hpp"
#include "taskgen/metric_store.hpp"
#include "taskgen/ranking_model.hpp"

using namespace taskgen;

namespace {

Schema flights() { return load_schema(std::string(TASKGEN_DATA_DIR) + "/flight_delay.schema.json"); }

RankingModel random_model(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1, 1);
    std::array<double, kFeatureDim> w{};
    for (double& x : w) x = u(rng);
    return RankingModel(w, 0.01 + 0.5 * (u(rng) + 1));
}

double norm2(const TaskFeatures& f) {
    double s = 0;
    for (double v : f.values) s += v * v;
    return s;
}

MetricRecord record(std::string session, TaskId id, const char* status) {
    MetricRecord r;
    r.session = std::move(session);
    r.task_id = id;
    r.petel = "Entity: <E>, Filter: NONE, Aggregator: count_agg(None)";
    r.status = status;
    return r;
}

} // namespace

TEST_SUITE("recommender") {

TEST_CASE("feature layout") {
    const Schema s = flights();
    const Task t = parse_petel("Entity: AIRLINE\nFilter: greater_fil(<DEPARTURE_DELAY, 10>)\n"
                               "Aggregator: avg_agg(<ARRIVAL_DELAY>)");
    const auto f = featurize_task(t, s, TaskMetrics{0.8, 1.0, 0.6, 0.8}, std::nullopt);
    CHECK(f.values.size() == 25);
    CHECK(f.has_metrics);
    CHECK(f.values[slot::kFilterOp + 1] == 1.0);
    CHECK(f.values[slot::kAggOp + 2] == 1.0);
    CHECK(f.values[slot::kFilterKind + 3] == 1.0);
    CHECK(f.values[slot::kAggKind + 2] == 1.0);
    CHECK(f.values[slot::kHasThreshold] == 1.0);
    CHECK(f.values[slot::kAccuracy] == 0.8);
    CHECK(f.values[slot::kTimeScore] == 0.5);
    CHECK(f.values[slot::kBias] == 1.0);
    CHECK(norm2(f) >= 1.0);
}

TEST_CASE("features ignore attribute names") {
    Schema a("a", {{"T", AttributeKind::Time}, {"CUSTOMER", AttributeKind::Entity}, {"PRICE", AttributeKind::Numerical}},
             "%Y");
    Schema b("b", {{"T", AttributeKind::Time}, {"AIRLINE", AttributeKind::Entity}, {"DELAY", AttributeKind::Numerical}},
             "%Y");
    const auto fa = featurize_task(parse_petel("Entity: CUSTOMER\nFilter: NONE\nAggregator: max_agg(<PRICE>)"), a,
                                   std::nullopt, std::nullopt);
    const auto fb = featurize_task(parse_petel("Entity: AIRLINE\nFilter: NONE\nAggregator: max_agg(<DELAY>)"), b,
                                   std::nullopt, std::nullopt);
    CHECK(fa.values == fb.values);
}

TEST_CASE("untrained model is indifferent") {
    const auto pool = sim::make_pool(1, 50);
    for (const auto& f : pool.items) CHECK(RankingModel{}.preference(f) == 0.5);
    CHECK_THROWS_AS(RankingModel(0.0), std::invalid_argument);
    CHECK_THROWS_AS(RankingModel(-1.0), std::invalid_argument);
}

TEST_CASE("feedback strictly moves the judged task's own score") {
    std::mt19937_64 rng(2024);
    const auto pool = sim::make_pool(7, 500);
    for (int i = 0; i < 10000; ++i) {
        const RankingModel m = random_model(rng);
        const auto& x = pool.items[rng() % pool.items.size()];
        const Verdict v = rng() % 2 ? Verdict::Useful : Verdict::NotUseful;
        const RankingModel after = apply_feedback(m, x, {1, v, 0});
        if (v == Verdict::Useful) REQUIRE(after.preference(x) > m.preference(x));
        else REQUIRE(after.preference(x) < m.preference(x));
        REQUIRE(after.feedback_log().size() == 1);
    }
}

TEST_CASE("update rule") {
    const auto pool = sim::make_pool(3, 5);
    const auto& x = pool.items[0];
    const RankingModel m0(0.1);
    const auto m1 = apply_feedback(m0, x, {1, Verdict::NotUseful, 0});
    for (std::size_t i = 0; i < kFeatureDim; ++i) CHECK(m1.weights()[i] == doctest::Approx(-0.05 * x.values[i]));
}

TEST_CASE("useful then not_useful returns near the start") {
    std::mt19937_64 rng(9);
    const auto pool = sim::make_pool(4, 100);
    for (int i = 0; i < 500; ++i) {
        std::uniform_real_distribution<double> u(-1, 1);
        std::array<double, kFeatureDim> w{};
        for (double& v : w) v = u(rng);
        const RankingModel m(w, 0.01);
        const auto& x = pool.items[rng() % pool.items.size()];
        auto m2 = apply_feedback(apply_feedback(m, x, {1, Verdict::Useful, 0}), x, {1, Verdict::NotUseful, 1});
        CHECK(std::abs(m2.logit(x) - m.logit(x)) <= 0.01 * norm2(x));
        CHECK(m2.feedback_count() == 2);
    }
}

TEST_CASE("export and import round trip") {
    std::mt19937_64 rng(1);
    RankingModel m(0.2);
    const auto pool = sim::make_pool(5, 100);
    for (int i = 0; i < 30; ++i)
        m = apply_feedback(m, pool.items[rng() % 100], {1, i % 3 ? Verdict::Useful : Verdict::NotUseful, i});
    const auto blob = export_model(m);
    CHECK(blob["version"] == kFeatureLayoutVersion);
    CHECK(blob["weights"].size() == kFeatureDim);
    CHECK(blob["feedback_count"] == 30);
    const auto back = import_model_text(blob.dump());
    CHECK(back.eta() == 0.2);
    CHECK(back.feedback_count() == 30);
    for (const auto& f : pool.items) CHECK(back.preference(f) == m.preference(f));
    CHECK(import_model(blob, 0.05).eta() == 0.05);

    const auto zero = export_model(RankingModel{});
    for (const auto& w : zero["weights"]) CHECK(w.get<double>() == 0.0);
}

TEST_CASE("imported model scores and learns in a different schema") {
    const auto source = sim::make_pool(10, 100);
    RankingModel m;
    for (const auto& f : source.items) m = apply_feedback(m, f, {1, Verdict::Useful, 0});
    RankingModel warm = import_model(export_model(m));
    const Schema s = flights();
    const Task t = parse_petel("Entity: AIRLINE\nFilter: NONE\nAggregator: avg_agg(<ARRIVAL_DELAY>)");
    const auto f = featurize_task(t, s, TaskMetrics{0.5, 0.1, 0.5, 0.8}, std::nullopt);
    const double before = warm.preference(f);
    warm = apply_feedback(warm, f, {task_id(t), Verdict::NotUseful, 0});
    CHECK(warm.preference(f) < before);
}

TEST_CASE("import errors") {
    auto blob = export_model(RankingModel{});
    blob["version"] = kFeatureLayoutVersion + 1;
    CHECK_THROWS_AS(import_model(blob), VersionError);
    CHECK_THROWS_AS(import_model_text("{not json"), CorruptBlob);
    CHECK_THROWS_AS(import_model_text("[1,2,3]"), CorruptBlob);
    auto short_w = export_model(RankingModel{});
    short_w["weights"].erase(0);
    CHECK_THROWS_AS(import_model(short_w), CorruptBlob);
    auto bad_eta = export_model(RankingModel{});
    bad_eta["eta"] = -1;
    CHECK_THROWS_AS(import_model(bad_eta), CorruptBlob);
    auto missing = export_model(RankingModel{});
    missing.erase("weights");
    CHECK_THROWS_AS(import_model(missing), CorruptBlob);
}

TEST_CASE("simulation converges and warm start helps") {
    const auto target = sim::make_pool(100, 2000);
    const auto source = sim::make_pool(107, 2000);
    const auto hidden = sim::make_oracle(1, target);
    sim::Protocol p;
    p.judge = sim::Judge::Slate;
    const auto cold = sim::run(RankingModel{}, hidden, target, p, 1);
    CHECK(cold.rounds_to_target <= p.rounds);
    sim::Protocol pre = p;
    pre.rounds = 300;
    const auto src = sim::run(RankingModel{}, hidden, source, pre, 1001);
    const auto warm = sim::run(import_model(export_model(src.model)), hidden, target, p, 1);
    CHECK(warm.rounds_to_target < cold.rounds_to_target);
}

TEST_CASE("metric store round trip") {
    MetricStore store;
    auto r = record("s1", 5, status::kEvaluated);
    r.promise = PromiseScore{1, 0.5, 0.5, 1, 0.625};
    r.metrics = TaskMetrics{0.75, 0.001, 0.5, 0.8};
    store.append(r);
    auto f = record("s1", 6, status::kFailed);
    f.error = "boom";
    store.append(f);
    store.append(record("s2", 5, status::kInvalid));
    const auto text = serialize_store(store);
    const auto back = parse_store(text);
    CHECK(back.warnings.empty());
    CHECK(back.store.log() == store.log());
    CHECK(serialize_store(back.store) == text);
}

TEST_CASE("metric store skips corrupt lines") {
    MetricStore store;
    for (TaskId i = 1; i <= 10; ++i) store.append(record("s", i, status::kCandidate));
    std::string text = serialize_store(store);
    std::vector<std::string> lines;
    std::size_t pos = 0;
    while ((pos = text.find('\n')) != std::string::npos) {
        lines.push_back(text.substr(0, pos));
        text.erase(0, pos + 1);
    }
    REQUIRE(lines.size() == 10);
    lines[4] = lines[4].substr(0, lines[4].size() / 2);
    std::string broken;
    for (const auto& l : lines) broken += l + "\n";
    const auto back = parse_store(broken);
    CHECK(back.store.size() == 9);
    REQUIRE(back.warnings.size() == 1);
    CHECK(back.warnings[0].rfind("line 5", 0) == 0);
}

TEST_CASE("metric store latest record wins") {
    MetricStore store;
    store.append(record("s", 1, status::kCandidate));
    store.append(record("s", 2, status::kCandidate));
    store.append(record("s", 1, status::kEvaluated));
    const auto view = store.view();
    REQUIRE(view.size() == 2);
    CHECK(view[0].task_id == 1);
    CHECK(view[0].status == status::kEvaluated);
    CHECK(view[0].revision == 3);
    CHECK(store.latest("s", 2)->status == status::kCandidate);
    CHECK(!store.latest("t", 1));

    MetricStore restored;
    auto high = record("s", 1, status::kFailed);
    high.revision = 7;
    restored.restore(high);
    const auto& next = restored.append(record("s", 1, status::kEvaluated));
    CHECK(next.revision == 8);
}

TEST_CASE("metric store files") {
    const auto path = std::filesystem::temp_directory_path() / "taskgen_store_test.jsonl";
    MetricStore store;
    store.append(record("s", 1, status::kScreened));
    persist_store(store, path);
    const auto back = load_store(path);
    CHECK(back.store.log() == store.log());
    std::filesystem::remove(path);
    CHECK_THROWS_AS(load_store(path), Error);
}

}
