#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "mimic/bit_string.hpp"
#include "mimic/fitness.hpp"
#include "mimic/model.hpp"
#include "mimic/random.hpp"

namespace mimic {

/// True iff consecutive ranks (0,1), (2,3), ... hold exactly the EBOM blocks
/// {2j, 2j+1}, in either order.
bool is_correct_permutation(std::span<const std::size_t> order);

/// Reference model for EBOM: identity order, 1/2 at the block-leading
/// position, (1/n, 1 - 1/n) at its partner.
ChainModel ideal_model(std::size_t n);

struct BlockRoles {
  std::size_t central = 0;
  std::size_t border = 0;
};

/// The position owning the entry farthest from 0.5 among the four entries of
/// the pair at ranks (2 * pair_index, 2 * pair_index + 1) is the border one.
/// Requires a correct permutation.
BlockRoles classify_block(const ChainModel& model, std::size_t pair_index, RandomSource& rng);

struct DeviationSummary {
  double max = 0.0;
  double mean = 0.0;
  double min = 0.0;
};

struct OptimumProbability {
  double value = 0.0;
  bool exact = false;
  double standard_error = 0.0; // zero when exact
};

struct ModelQualityReport {
  bool permutation_correct = false;
  std::vector<BlockRoles> blocks;          // empty unless the permutation is correct
  std::optional<DeviationSummary> central; // |P - 1/2| over central entries
  std::optional<DeviationSummary> border;  // distance to 1/n (given 0) and 1 - 1/n (given 1)
  OptimumProbability optimum_probability;
};

/// Full quality report; throws std::invalid_argument on an incorrect
/// permutation.
ModelQualityReport deviation_stats(const ChainModel& model, RandomSource& rng);

/// Like deviation_stats, but reports an incorrect permutation instead of
/// throwing (deviations are then absent).
ModelQualityReport assess_model(const ChainModel& model, RandomSource& rng);

/// Probability that one sample is an EBOM optimum. Exact forward pass over
/// the chain when the permutation is correct; otherwise a Monte Carlo estimate
/// with its standard error.
OptimumProbability optimum_probability(const ChainModel& model, RandomSource& rng, std::size_t samples = 100000);
OptimumProbability optimum_probability(const ChainModel& model);

/// ((1 - 1/n)^n)^(1/2).
double ideal_optimum_probability(std::size_t n);

struct BirthdayBounds {
  double log_all_distinct = 0.0;   // natural log; -inf when m exceeds the optimum count
  double all_distinct = 1.0;       // exp(log_all_distinct)
  double bernoulli_lower = 1.0;    // max(0, 1 - m^2 / 2^(n/2))
  double duplicate_estimate = 0.0; // 1 - exp(-m^2 / 2^(n/2+1))
};

/// Chance that m uniform draws from 2^(n/2) optima are all distinct.
BirthdayBounds birthday_bounds(std::uint64_t m, std::size_t n);

/// Optima sampled during one run.
class DistinctOptimaLedger {
public:
  /// Throws std::invalid_argument if x is not an optimum of f.
  void add(const BitString& x, const FitnessFunction& f);

  std::uint64_t total() const noexcept { return total_; }
  std::uint64_t distinct() const noexcept { return seen_.size(); }
  std::uint64_t duplicates() const noexcept { return total_ - seen_.size(); }

private:
  std::unordered_set<std::string> seen_;
  std::uint64_t total_ = 0;
};

DistinctOptimaLedger ledger_update(DistinctOptimaLedger ledger, std::span<const BitString> optima,
                                   const FitnessFunction& f);

} // namespace mimic
