#include "mimic/statistics.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace mimic {

Population::Population(std::vector<BitString> members) : members_(std::move(members)) {
  for (const auto& m : members_) {
    if (m.size() != members_.front().size()) throw std::invalid_argument("Population: members differ in length");
  }
}

Population::Population(std::vector<BitString> members, std::vector<double> fitness)
    : Population(std::move(members)) {
  if (fitness.size() != members_.size()) throw std::invalid_argument("Population: fitness count mismatch");
  fitness_ = std::move(fitness);
}

namespace {

void check(const Population& s, std::size_t i) {
  if (s.empty()) throw std::invalid_argument("statistics: empty population");
  if (i >= s.length()) throw std::out_of_range("statistics: position out of range");
}

void check_pair(const Population& s, std::size_t i, std::size_t j) {
  check(s, i);
  check(s, j);
  if (i == j) throw std::invalid_argument("statistics: conditional statistic needs two distinct positions");
}

std::uint64_t count_ones(const Population& s, std::size_t i) {
  std::uint64_t c = 0;
  for (const auto& x : s.members()) c += x[i];
  return c;
}

PairCounts count_pairs(const Population& s, std::size_t i, std::size_t j) {
  PairCounts c;
  for (const auto& x : s.members()) ++c.n[x[i]][x[j]];
  return c;
}

double plogp(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

} // namespace

double entropy_from_counts(std::uint64_t ones, std::uint64_t total) {
  const double m = static_cast<double>(total);
  const double p1 = static_cast<double>(ones) / m;
  const double p0 = static_cast<double>(total - ones) / m;
  return -(plogp(p0) + plogp(p1));
}

double cond_freq_from_counts(const PairCounts& c, bool b1, bool b2) {
  const std::uint64_t given = c.n[0][b2] + c.n[1][b2];
  if (given == 0) return 0.5;
  return static_cast<double>(c.n[b1][b2]) / static_cast<double>(given);
}

double cond_entropy_from_counts(const PairCounts& c) {
  // Grouped by the conditioning value: sum over b2 of freq(b2) * H(i | j = b2).
  // Terms with freq(b2) = 0 vanish.
  const double total = static_cast<double>(c.total());
  double terms[2];
  for (int b2 = 0; b2 < 2; ++b2) {
    const std::uint64_t given = c.n[0][b2] + c.n[1][b2];
    terms[b2] = given == 0 ? 0.0 : (static_cast<double>(given) / total) * entropy_from_counts(c.n[1][b2], given);
  }
  return terms[0] + terms[1];
}

double freq(const Population& s, std::size_t i, bool b) {
  check(s, i);
  const auto ones = count_ones(s, i);
  return static_cast<double>(b ? ones : s.size() - ones) / static_cast<double>(s.size());
}

double cond_freq(const Population& s, std::size_t i, std::size_t j, bool b1, bool b2) {
  check_pair(s, i, j);
  return cond_freq_from_counts(count_pairs(s, i, j), b1, b2);
}

double entropy(const Population& s, std::size_t i) {
  check(s, i);
  return entropy_from_counts(count_ones(s, i), s.size());
}

double cond_entropy(const Population& s, std::size_t i, std::size_t j) {
  check_pair(s, i, j);
  return cond_entropy_from_counts(count_pairs(s, i, j));
}

ColumnIndex::ColumnIndex(const Population& s) {
  if (s.empty()) throw std::invalid_argument("ColumnIndex: empty population");
  members_ = s.size();
  words_ = (members_ + 63) / 64;
  const std::size_t n = s.length();
  bits_.assign(n * words_, 0);
  ones_.assign(n, 0);
  for (std::size_t k = 0; k < members_; ++k) {
    const auto& x = s[k];
    const std::uint64_t mask = std::uint64_t{1} << (k % 64);
    const std::size_t word = k / 64;
    for (std::size_t i = 0; i < n; ++i) {
      if (x[i]) {
        bits_[i * words_ + word] |= mask;
        ++ones_[i];
      }
    }
  }
}

PairCounts ColumnIndex::pair_counts(std::size_t i, std::size_t j) const {
  const std::uint64_t* a = &bits_[i * words_];
  const std::uint64_t* b = &bits_[j * words_];
  std::uint64_t both = 0;
  for (std::size_t w = 0; w < words_; ++w) both += static_cast<std::uint64_t>(std::popcount(a[w] & b[w]));
  PairCounts c;
  c.n[1][1] = both;
  c.n[1][0] = ones_[i] - both;
  c.n[0][1] = ones_[j] - both;
  c.n[0][0] = members_ - ones_[i] - ones_[j] + both;
  return c;
}

} // namespace mimic
