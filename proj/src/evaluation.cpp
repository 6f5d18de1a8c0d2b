#include "taskgen/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <random>
#include <set>

#include "taskgen/errors.hpp"
#include "taskgen/stats.hpp"

namespace taskgen {

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) noexcept {
    std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double raw_score(std::span<const Label> truth, std::span<const Label> predicted, LabelType type) {
    const std::size_t n = truth.size();
    if (n == 0) return 0;
    if (type == LabelType::Categorical) {
        std::size_t hit = 0;
        for (std::size_t i = 0; i < n; ++i) hit += truth[i] == predicted[i];
        return static_cast<double>(hit) / static_cast<double>(n);
    }
    double sum = 0;
    for (const auto& y : truth) sum += std::get<double>(y);
    const double mean = sum / static_cast<double>(n);
    double ss_tot = 0, ss_res = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double y = std::get<double>(truth[i]);
        const double e = y - std::get<double>(predicted[i]);
        ss_tot += (y - mean) * (y - mean);
        ss_res += e * e;
    }
    if (ss_tot == 0) return ss_res == 0 ? 1.0 : 0.0;
    return 1.0 - ss_res / ss_tot;
}

namespace {

double resample_score(std::span<const Label> truth, std::span<const Label> predicted, LabelType type,
                      std::uint64_t seed) {
    const std::size_t n = truth.size();
    std::mt19937_64 rng(seed);
    std::vector<Label> t(n), p(n);
    for (std::size_t i = 0; i < n; ++i) {
        // Plain modulo rather than uniform_int_distribution, whose output is
        // not specified across standard library implementations.
        const std::size_t j = static_cast<std::size_t>(rng() % n);
        t[i] = truth[j];
        p[i] = predicted[j];
    }
    return clamp01(raw_score(t, p, type));
}

Interval percentile_interval(std::vector<double>& scores, double level) {
    std::sort(scores.begin(), scores.end());
    const double tail = (1.0 - level) / 2.0;
    return Interval{nearest_rank(scores, tail), nearest_rank(scores, 1.0 - tail)};
}

void check_bootstrap_args(std::span<const Label> truth, std::span<const Label> predicted, std::size_t resamples,
                          double level) {
    if (truth.size() != predicted.size()) throw std::invalid_argument("truth/prediction length mismatch");
    if (truth.empty() || resamples == 0) throw std::invalid_argument("bootstrap needs data and resamples");
    if (!(level > 0 && level < 1)) throw std::invalid_argument("confidence level must lie in (0, 1)");
}

} // namespace

Interval bootstrap_interval(std::span<const Label> truth, std::span<const Label> predicted, LabelType type,
                            std::size_t resamples, double level, std::uint64_t seed) {
    check_bootstrap_args(truth, predicted, resamples, level);
    std::vector<double> scores(resamples);
#pragma omp parallel for schedule(static)
    for (std::size_t b = 0; b < resamples; ++b) scores[b] = resample_score(truth, predicted, type, mix_seed(seed, b));
    return percentile_interval(scores, level);
}

Interval bootstrap_interval_serial(std::span<const Label> truth, std::span<const Label> predicted, LabelType type,
                                   std::size_t resamples, double level, std::uint64_t seed) {
    check_bootstrap_args(truth, predicted, resamples, level);
    std::vector<double> scores(resamples);
    for (std::size_t b = 0; b < resamples; ++b) scores[b] = resample_score(truth, predicted, type, mix_seed(seed, b));
    return percentile_interval(scores, level);
}

namespace {

// Rough operation counts, scaled to seconds at 1 GFLOP/s.
double modeled_seconds(ModelKind kind, std::size_t n_train, std::size_t n_test, std::size_t dim, std::size_t classes) {
    const double n = static_cast<double>(n_train), m = static_cast<double>(n_test);
    const double d = static_cast<double>(dim) + 1;
    double ops = 0;
    switch (kind) {
    case ModelKind::ConstantBaseline: ops = n + m; break;
    case ModelKind::RidgeLinear: ops = n * d * d + d * d * d + m * d; break;
    case ModelKind::NearestCentroid: ops = 3 * n * d + m * static_cast<double>(classes) * d; break;
    }
    return ops * 1e-9;
}

struct KindResult {
    ModelKind kind;
    std::vector<Label> predictions; // parallel to the scored truth vector
    double score = 0;
    double seconds = 0;
};

} // namespace

Evaluation evaluate_task(const Task& task, const TrainingSet& ts, const Dataset& dataset,
                         const EvaluationOptions& options) {
    if (ts.examples.empty()) throw EmptyTrainingSet();

    // Time order, entity as tiebreak: every test cutoff >= every train cutoff.
    std::vector<std::size_t> order(ts.examples.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& ca = ts.examples[a].cutoff;
        const auto& cb = ts.examples[b].cutoff;
        return ca.time != cb.time ? ca.time < cb.time : ca.entity_value < cb.entity_value;
    });
    std::vector<Sample> samples;
    samples.reserve(order.size());
    for (std::size_t i : order) {
        const auto& ex = ts.examples[i];
        samples.push_back({featurize_window(dataset, task.entity, ex.cutoff, task.params.history), ex.label});
    }
    const std::size_t n = samples.size();
    const std::size_t dim = samples.front().x.size();

    std::vector<ModelKind> kinds;
    for (ModelKind k : options.kinds)
        if (supports(k, ts.label_type) && std::find(kinds.begin(), kinds.end(), k) == kinds.end()) kinds.push_back(k);
    if (kinds.empty()) kinds.push_back(ModelKind::ConstantBaseline);

    std::set<std::string> distinct;
    if (ts.label_type == LabelType::Categorical)
        for (const auto& s : samples) distinct.insert(std::get<std::string>(s.y));
    const std::size_t classes = distinct.size();

    Evaluation ev;
    ev.diagnostics.leave_one_out = n < options.min_split;
    std::vector<Label> truth;
    std::vector<KindResult> results;

    if (ev.diagnostics.leave_one_out) {
        for (const auto& s : samples) truth.push_back(s.y);
        ev.diagnostics.n_train = n > 1 ? n - 1 : n;
        ev.diagnostics.n_test = n;
        for (ModelKind k : kinds) {
            KindResult r{k, {}, 0, 0};
            const auto start = std::chrono::steady_clock::now();
            for (std::size_t i = 0; i < n; ++i) {
                std::vector<Sample> rest;
                for (std::size_t j = 0; j < n; ++j)
                    if (j != i || n == 1) rest.push_back(samples[j]);
                r.predictions.push_back(fit(k, rest).predict(samples[i].x));
            }
            const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            r.seconds = options.timing == TimingMode::Measured
                            ? wall
                            : static_cast<double>(n) * modeled_seconds(k, ev.diagnostics.n_train, 1, dim, classes);
            r.score = raw_score(truth, r.predictions, ts.label_type);
            results.push_back(std::move(r));
        }
    } else {
        const auto n_train = std::clamp<std::size_t>(
            static_cast<std::size_t>(static_cast<double>(n) * options.train_fraction), 1, n - 1);
        const std::span<const Sample> train(samples.data(), n_train);
        const std::span<const Sample> test(samples.data() + n_train, n - n_train);
        for (const auto& s : test) truth.push_back(s.y);
        ev.diagnostics.n_train = train.size();
        ev.diagnostics.n_test = test.size();
        for (ModelKind k : kinds) {
            KindResult r{k, {}, 0, 0};
            const auto start = std::chrono::steady_clock::now();
            const FittedModel model = fit(k, train);
            for (const auto& s : test) r.predictions.push_back(model.predict(s.x));
            const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            r.seconds = options.timing == TimingMode::Measured ? wall
                                                               : modeled_seconds(k, train.size(), test.size(), dim, classes);
            r.score = raw_score(truth, r.predictions, ts.label_type);
            results.push_back(std::move(r));
        }
    }

    // Earlier kinds win ties, so simpler models are preferred.
    const KindResult* best = &results.front();
    for (const auto& r : results)
        if (r.score > best->score) best = &r;

    const Interval ci = bootstrap_interval(truth, best->predictions, ts.label_type, options.bootstrap_resamples,
                                           options.ci_level, options.seed);
    ev.diagnostics.best_kind = best->kind;
    ev.diagnostics.raw_score = best->score;
    ev.diagnostics.ci_low = ci.low;
    ev.diagnostics.ci_high = ci.high;
    ev.metrics.accuracy = clamp01(best->score);
    ev.metrics.seconds = best->seconds;
    ev.metrics.confidence = clamp01(1.0 - ci.width());
    ev.metrics.explainability = explainability(best->kind);
    return ev;
}

} // namespace taskgen
