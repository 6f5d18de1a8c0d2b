#pragma once
// Seeded feedback simulation: a hidden linear preference over TaskFeatures
// answers useful/not_useful and the ranker learns from those verdicts.

#include <cstdint>
#include <random>
#include <vector>

#include "taskgen/ranking_model.hpp"

namespace sim {

struct Pool {
    std::vector<taskgen::TaskFeatures> items;
};

/// Featurised random tasks over a random schema, with random metrics.
Pool make_pool(std::uint64_t seed, std::size_t size);

struct Oracle {
    std::array<double, taskgen::kFeatureDim> v{};
    double threshold = 0; // useful iff v . x > threshold

    double score(const taskgen::TaskFeatures& f) const;
    bool useful(const taskgen::TaskFeatures& f) const { return score(f) > threshold; }
};

/// Hidden preference drawn from `seed`; threshold at the `quantile` of the pool's scores.
Oracle make_oracle(std::uint64_t seed, const Pool& calibration, double quantile = 0.5);

enum class Judge { Top, Random, Slate };

struct Protocol {
    Judge judge = Judge::Top;      // which shown tasks receive a verdict
    std::size_t slate = 5;         // candidates shown per round
    std::size_t eval_slates = 300; // fixed slates for measuring agreement
    std::size_t rounds = 500;
    double target = 0.9;
};

/// Fraction of fixed slates where the model's top task is the oracle's.
double top1_agreement(const taskgen::RankingModel& model, const Oracle& oracle, const Pool& pool,
                      const std::vector<std::vector<std::size_t>>& slates);

std::vector<std::vector<std::size_t>> make_slates(const Pool& pool, std::size_t count, std::size_t size,
                                                  std::uint64_t seed);

struct Trace {
    taskgen::RankingModel model;
    std::vector<double> agreement; // after each round, index 0 = before any feedback
    /// First round count at which agreement >= target; rounds + 1 if never.
    std::size_t rounds_to_target = 0;
};

/// Each round shows a random slate, the user judges the model's top pick.
Trace run(taskgen::RankingModel start, const Oracle& oracle, const Pool& pool, const Protocol& protocol,
          std::uint64_t seed);

} // namespace sim
