#pragma once

#include <cstddef>

#include "mimic/fitness.hpp"
#include "mimic/model.hpp"
#include "mimic/random.hpp"
#include "mimic/statistics.hpp"

namespace mimic {

struct MimicParams {
  std::size_t n = 0;
  std::size_t lambda = 0; // offspring per iteration
  std::size_t mu = 0;     // selected per iteration

  /// lambda = floor(factor * n * ln n), mu = floor(lambda / divisor).
  static MimicParams scaled(std::size_t n, double lambda_factor = 12.0, std::size_t mu_divisor = 8);

  double clamp_lo() const { return 1.0 / static_cast<double>(n); }
  double clamp_hi() const { return 1.0 - 1.0 / static_cast<double>(n); }

  /// Throws std::invalid_argument unless n >= 2 and 1 <= mu <= lambda.
  void validate() const;
};

/// Keeps the mu fittest members; members tied at the cutoff are chosen
/// uniformly at random. Uses cached fitness when present.
Population truncation_select(const Population& offspring, const FitnessFunction& f, std::size_t mu, RandomSource& rng);

/// Greedy chain construction: the first position minimizes entropy, each next
/// one minimizes entropy conditional on its predecessor. Ties (exact equality)
/// are broken uniformly via rng. The result is clamped to [1/n, 1 - 1/n].
ChainModel build_model(const Population& selected, const MimicParams& params, RandomSource& rng);

/// Restricts every entry to [1/n, 1 - 1/n]; the order is unchanged.
ChainModel clamp(const ChainModel& model, std::size_t n);

struct IterationStats {
  std::size_t optimum_count = 0;
  double best_fitness = 0.0;
};

struct IterationResult {
  ChainModel model;     // model for the next iteration
  Population offspring; // all lambda samples, with fitness
  IterationStats stats;
};

/// One MIMIC iteration: sample lambda, select mu, rebuild and clamp.
IterationResult mimic_iteration(const ChainModel& model, const FitnessFunction& f, const MimicParams& params,
                                RandomSource& rng);

} // namespace mimic
