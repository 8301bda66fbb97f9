#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "mimic/bit_string.hpp"
#include "mimic/random.hpp"

namespace mimic {

/// Conditional probabilities of one position: entry b is the probability to
/// sample a 1 given that the chain predecessor was b.
using CondProbs = std::array<double, 2>;

/// MIMIC's chain-structured model: a sampling order over positions and, per
/// position, the probability of a 1 conditional on the predecessor's bit.
///
/// Invariants checked at construction: `order` is a permutation of [0, n),
/// every probability lies in [0, 1], and the first position in the order has
/// equal entries (it has no predecessor). Clamping to [1/n, 1 - 1/n] is a
/// property of built models, not of the type.
class ChainModel {
public:
  ChainModel(std::vector<std::size_t> order, std::vector<CondProbs> probs);

  std::size_t size() const noexcept { return order_.size(); }

  /// order()[r] is the position sampled at rank r.
  std::span<const std::size_t> order() const noexcept { return order_; }

  /// probs()[i] is indexed by position, not rank.
  std::span<const CondProbs> probs() const noexcept { return probs_; }
  const CondProbs& probs_at(std::size_t position) const { return probs_.at(position); }

  friend bool operator==(const ChainModel&, const ChainModel&) = default;

private:
  std::vector<std::size_t> order_;
  std::vector<CondProbs> probs_;
};

/// Identity order, all entries 1/2.
ChainModel initial_model(std::size_t n);

/// Samples bits in chain order.
BitString sample_chain(const ChainModel& model, RandomSource& rng);

/// Closed-form probability that sample_chain returns y.
double exact_probability(const ChainModel& model, const BitString& y);

/// Product distribution over bits (the model of any univariate EDA).
class UnivariateModel {
public:
  explicit UnivariateModel(std::vector<double> freqs);

  std::size_t size() const noexcept { return freqs_.size(); }
  double operator[](std::size_t i) const noexcept { return freqs_[i]; }
  std::span<const double> freqs() const noexcept { return freqs_; }

private:
  std::vector<double> freqs_;
};

BitString sample_univariate(const UnivariateModel& model, RandomSource& rng);
double exact_probability(const UnivariateModel& model, const BitString& y);

/// Snapshot text format, one row per rank in chain order:
///   pi_rank,position,P_given_0,P_given_1
/// with 1-based rank and position.
void write_snapshot(std::ostream& out, const ChainModel& model);
ChainModel read_snapshot(std::istream& in);

} // namespace mimic
