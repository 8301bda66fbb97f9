#include "mimic/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace mimic {

bool is_correct_permutation(std::span<const std::size_t> order) {
  if (order.empty() || order.size() % 2 != 0) return false;
  std::vector<bool> seen(order.size(), false);
  for (std::size_t r = 0; r < order.size(); r += 2) {
    const std::size_t lo = std::min(order[r], order[r + 1]);
    const std::size_t hi = std::max(order[r], order[r + 1]);
    if (hi >= order.size() || lo % 2 != 0 || hi != lo + 1 || seen[lo]) return false;
    seen[lo] = true;
  }
  return true;
}

ChainModel ideal_model(std::size_t n) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("ideal_model: n must be even and at least 2");
  const double lo = 1.0 / static_cast<double>(n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<CondProbs> probs(n);
  for (std::size_t i = 0; i < n; i += 2) {
    probs[i] = CondProbs{0.5, 0.5};
    probs[i + 1] = CondProbs{lo, 1.0 - lo};
  }
  return ChainModel(std::move(order), std::move(probs));
}

BlockRoles classify_block(const ChainModel& model, std::size_t pair_index, RandomSource& rng) {
  if (!is_correct_permutation(model.order())) {
    throw std::invalid_argument("classify_block: permutation is not correct");
  }
  if (2 * pair_index + 1 >= model.size()) throw std::out_of_range("classify_block: pair index out of range");
  const std::size_t a = model.order()[2 * pair_index];
  const std::size_t b = model.order()[2 * pair_index + 1];
  const std::size_t owner[4] = {a, a, b, b};
  const double dev[4] = {std::abs(model.probs_at(a)[0] - 0.5), std::abs(model.probs_at(a)[1] - 0.5),
                         std::abs(model.probs_at(b)[0] - 0.5), std::abs(model.probs_at(b)[1] - 0.5)};
  const double top = *std::max_element(dev, dev + 4);
  std::vector<std::size_t> ties;
  for (std::size_t k = 0; k < 4; ++k) {
    if (dev[k] == top) ties.push_back(k);
  }
  const std::size_t border = owner[ties.size() == 1 ? ties.front() : ties[rng.below(ties.size())]];
  return BlockRoles{border == a ? b : a, border};
}

namespace {

DeviationSummary summarize(const std::vector<double>& values) {
  DeviationSummary s;
  s.max = *std::max_element(values.begin(), values.end());
  s.min = *std::min_element(values.begin(), values.end());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  // Rounding in the mean must not break min <= mean <= max.
  s.mean = std::clamp(s.mean, s.min, s.max);
  return s;
}

double exact_block_chain_probability(const ChainModel& model) {
  // mass[b]: probability that all pairs so far are correct and the last bit is b.
  // The head entries are equal, so starting from "predecessor 0" is exact.
  double mass[2] = {1.0, 0.0};
  const auto order = model.order();
  for (std::size_t r = 0; r < order.size(); r += 2) {
    const auto& first = model.probs_at(order[r]);
    const auto& second = model.probs_at(order[r + 1]);
    const double into1 = mass[0] * first[0] + mass[1] * first[1];
    const double into0 = mass[0] * (1.0 - first[0]) + mass[1] * (1.0 - first[1]);
    mass[1] = into1 * second[1];
    mass[0] = into0 * (1.0 - second[0]);
  }
  return mass[0] + mass[1];
}

} // namespace

OptimumProbability optimum_probability(const ChainModel& model, RandomSource& rng, std::size_t samples) {
  if (is_correct_permutation(model.order())) {
    return OptimumProbability{exact_block_chain_probability(model), true, 0.0};
  }
  if (model.size() % 2 != 0) return OptimumProbability{0.0, true, 0.0};
  if (samples == 0) throw std::invalid_argument("optimum_probability: need at least one sample");
  std::size_t hits = 0;
  for (std::size_t k = 0; k < samples; ++k) hits += is_ebom_optimum(sample_chain(model, rng));
  const double p = static_cast<double>(hits) / static_cast<double>(samples);
  return OptimumProbability{p, false, std::sqrt(p * (1.0 - p) / static_cast<double>(samples))};
}

OptimumProbability optimum_probability(const ChainModel& model) {
  RandomSource rng(0x6f7074696d756dULL);
  return optimum_probability(model, rng);
}

ModelQualityReport assess_model(const ChainModel& model, RandomSource& rng) {
  ModelQualityReport report;
  report.permutation_correct = is_correct_permutation(model.order());
  if (report.permutation_correct) {
    const double lo = 1.0 / static_cast<double>(model.size());
    const double hi = 1.0 - lo;
    std::vector<double> central;
    std::vector<double> border;
    for (std::size_t j = 0; j < model.size() / 2; ++j) {
      const auto roles = classify_block(model, j, rng);
      report.blocks.push_back(roles);
      const auto& c = model.probs_at(roles.central);
      const auto& b = model.probs_at(roles.border);
      central.push_back(std::abs(c[0] - 0.5));
      central.push_back(std::abs(c[1] - 0.5));
      border.push_back(std::abs(b[0] - lo));
      border.push_back(std::abs(b[1] - hi));
    }
    report.central = summarize(central);
    report.border = summarize(border);
  }
  report.optimum_probability = optimum_probability(model, rng);
  return report;
}

ModelQualityReport deviation_stats(const ChainModel& model, RandomSource& rng) {
  if (!is_correct_permutation(model.order())) {
    throw std::invalid_argument("deviation_stats: permutation is not correct");
  }
  return assess_model(model, rng);
}

double ideal_optimum_probability(std::size_t n) {
  if (n < 2) throw std::invalid_argument("ideal_optimum_probability: n must be at least 2");
  const double nd = static_cast<double>(n);
  return std::sqrt(std::pow(1.0 - 1.0 / nd, nd));
}

BirthdayBounds birthday_bounds(std::uint64_t m, std::size_t n) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("birthday_bounds: n must be even and at least 2");
  BirthdayBounds b;
  const double optima = std::ldexp(1.0, static_cast<int>(n / 2));
  const double md = static_cast<double>(m);
  b.bernoulli_lower = std::max(0.0, 1.0 - md * md / optima);
  b.duplicate_estimate = -std::expm1(-md * md / (2.0 * optima));
  if (md > optima) {
    b.log_all_distinct = -std::numeric_limits<double>::infinity();
    b.all_distinct = 0.0;
    return b;
  }
  double log_p = 0.0;
  if (m <= (std::uint64_t{1} << 22)) {
    for (std::uint64_t i = 1; i < m; ++i) log_p += std::log1p(-static_cast<double>(i) / optima);
  } else if (md / optima < 1e-3) {
    // sum_{i<m} log(1 - i/N) = -S1/N - S2/(2N^2) - S3/(3N^3) - ..., S_k = sum i^k
    const double s1 = md * (md - 1.0) / 2.0;
    const double s2 = (md - 1.0) * md * (2.0 * md - 1.0) / 6.0;
    const double s3 = s1 * s1;
    log_p = -s1 / optima - s2 / (2.0 * optima * optima) - s3 / (3.0 * optima * optima * optima);
  } else {
    const long double nl = optima;
    const long double ml = md;
    log_p = static_cast<double>(std::lgamma(nl + 1.0L) - std::lgamma(nl - ml + 1.0L) - ml * std::log(nl));
  }
  b.log_all_distinct = log_p;
  b.all_distinct = std::exp(log_p);
  return b;
}

void DistinctOptimaLedger::add(const BitString& x, const FitnessFunction& f) {
  if (!f.is_optimum(x)) throw std::invalid_argument("DistinctOptimaLedger: not an optimum: " + x.to_string());
  ++total_;
  seen_.insert(x.packed());
}

DistinctOptimaLedger ledger_update(DistinctOptimaLedger ledger, std::span<const BitString> optima,
                                   const FitnessFunction& f) {
  for (const auto& x : optima) ledger.add(x, f);
  return ledger;
}

} // namespace mimic
