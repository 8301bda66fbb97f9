#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mimic/bit_string.hpp"

namespace mimic {

/// Ordered multiset of equal-length bit strings with optional cached fitness.
class Population {
public:
  Population() = default;
  explicit Population(std::vector<BitString> members);
  Population(std::vector<BitString> members, std::vector<double> fitness);

  std::size_t size() const noexcept { return members_.size(); }
  bool empty() const noexcept { return members_.empty(); }
  /// Common length of all members (0 when empty).
  std::size_t length() const noexcept { return members_.empty() ? 0 : members_.front().size(); }

  const BitString& operator[](std::size_t k) const noexcept { return members_[k]; }
  std::span<const BitString> members() const noexcept { return members_; }

  bool has_fitness() const noexcept { return !members_.empty() && fitness_.size() == members_.size(); }
  std::span<const double> fitness() const noexcept { return fitness_; }

private:
  std::vector<BitString> members_;
  std::vector<double> fitness_;
};

// Empirical statistics. Positions are 0-based; all counts are integers and
// divided once, so symmetric positions produce bit-identical values.

double freq(const Population& s, std::size_t i, bool b);

/// Frequency of b1 at i among members with b2 at j; exactly 1/2 when no member
/// has b2 at j.
double cond_freq(const Population& s, std::size_t i, std::size_t j, bool b1, bool b2);

/// Binary entropy (base 2) of position i, with 0 log 0 = 0.
double entropy(const Population& s, std::size_t i);

/// Entropy of position i conditional on position j.
double cond_entropy(const Population& s, std::size_t i, std::size_t j);

/// Joint counts of two positions; n[b1][b2] = #members with x_i = b1, x_j = b2.
struct PairCounts {
  std::uint64_t n[2][2] = {{0, 0}, {0, 0}};
  std::uint64_t total() const { return n[0][0] + n[0][1] + n[1][0] + n[1][1]; }
};

double entropy_from_counts(std::uint64_t ones, std::uint64_t total);
double cond_freq_from_counts(const PairCounts& c, bool b1, bool b2);
double cond_entropy_from_counts(const PairCounts& c);

/// Column-major bitset view of a population for fast pair counting.
class ColumnIndex {
public:
  explicit ColumnIndex(const Population& s);

  std::size_t members() const noexcept { return members_; }
  std::size_t length() const noexcept { return ones_.size(); }
  std::uint64_t ones(std::size_t i) const { return ones_[i]; }
  PairCounts pair_counts(std::size_t i, std::size_t j) const;

private:
  std::size_t members_ = 0;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> bits_; // length() columns of words_ words each
  std::vector<std::uint64_t> ones_;
};

} // namespace mimic
