// Serial vs OpenMP timings for the parallel kernels.
// Run with OMP_NUM_THREADS set to compare thread counts.

#include <benchmark/benchmark.h>

#include <random>

#include "taskgen/enumeration.hpp"
#include "taskgen/evaluation.hpp"
#include "taskgen/labeling.hpp"
#include "taskgen/pipeline.hpp"

using namespace taskgen;

namespace {

const std::string kData = TASKGEN_DATA_DIR;

Schema wide_schema() {
    std::vector<Attribute> attrs{{"T", AttributeKind::Time}};
    for (int i = 0; i < 12; ++i) attrs.push_back({"E" + std::to_string(i), AttributeKind::Entity});
    for (int i = 0; i < 12; ++i) attrs.push_back({"C" + std::to_string(i), AttributeKind::Categorical});
    for (int i = 0; i < 16; ++i) attrs.push_back({"X" + std::to_string(i), AttributeKind::Numerical});
    return Schema("wide", attrs, "%Y-%m-%d");
}

// 20k rows over a year, 50 entities, one categorical and one numerical column.
const Dataset& events() {
    static const Dataset ds = [] {
        Schema s("events",
                 {{"T", AttributeKind::Time},
                  {"E", AttributeKind::Entity},
                  {"C", AttributeKind::Categorical},
                  {"X", AttributeKind::Numerical}},
                 "%Y-%m-%d %H:%M:%S");
        std::mt19937_64 rng(1);
        std::uniform_int_distribution<Instant> when(0, 365 * 86400);
        std::uniform_int_distribution<int> ent(0, 49), cat(0, 4);
        std::normal_distribution<double> x(10, 5);
        std::vector<RowInput> rows;
        for (int i = 0; i < 20000; ++i)
            rows.push_back({1420070400 + when(rng),
                            {std::nullopt, "e" + std::to_string(ent(rng)), "c" + std::to_string(cat(rng)),
                             std::to_string(x(rng))}});
        return Dataset::from_rows(s, rows);
    }();
    return ds;
}

const Task kSumOverThreshold{"E", {FilterOp::Greater, "X", std::nullopt, Literal(10.0)}, {AggOp::Sum, "X"}, {}};

void BM_enumerate_serial(benchmark::State& st) {
    const Schema s = wide_schema();
    for (auto _ : st) benchmark::DoNotOptimize(enumerate_tasks_serial(s, OpConfig{}));
}
void BM_enumerate_omp(benchmark::State& st) {
    const Schema s = wide_schema();
    for (auto _ : st) benchmark::DoNotOptimize(enumerate_tasks(s, OpConfig{}));
}

void BM_training_set_serial(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(build_training_set_serial(kSumOverThreshold, events()));
}
void BM_training_set_omp(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(build_training_set(kSumOverThreshold, events()));
}

std::pair<std::vector<Label>, std::vector<Label>> scored_pairs() {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> g(0, 1);
    std::vector<Label> t, p;
    for (int i = 0; i < 2000; ++i) {
        const double y = g(rng);
        t.emplace_back(y);
        p.emplace_back(y + 0.3 * g(rng));
    }
    return {t, p};
}

void BM_bootstrap_serial(benchmark::State& st) {
    const auto [t, p] = scored_pairs();
    for (auto _ : st) benchmark::DoNotOptimize(bootstrap_interval_serial(t, p, LabelType::Numeric, 1000, 0.9, 7));
}
void BM_bootstrap_omp(benchmark::State& st) {
    const auto [t, p] = scored_pairs();
    for (auto _ : st) benchmark::DoNotOptimize(bootstrap_interval(t, p, LabelType::Numeric, 1000, 0.9, 7));
}

void run_toy(benchmark::State& st, bool parallel) {
    const auto loaded = load_dataset(kData + "/toy_flights.csv", load_schema(kData + "/toy_flights.schema.json"));
    PipelineConfig c;
    c.parallel = parallel;
    for (auto _ : st) {
        MetricStore store;
        benchmark::DoNotOptimize(run_pipeline(loaded.dataset, c, RankingModel{}, store, "bench"));
    }
}
void BM_pipeline_serial(benchmark::State& st) { run_toy(st, false); }
void BM_pipeline_omp(benchmark::State& st) { run_toy(st, true); }

} // namespace

BENCHMARK(BM_enumerate_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_enumerate_omp)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_training_set_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_training_set_omp)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_bootstrap_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_bootstrap_omp)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_pipeline_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_pipeline_omp)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
