#include "mimic/theory.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace mimic {

namespace {

void require_even(const UnivariateModel& p, const char* where) {
  if (p.size() % 2 != 0) throw std::invalid_argument(std::string(where) + ": length must be even");
}

std::vector<double> mismatch_probabilities(const UnivariateModel& p) {
  std::vector<double> s(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) s[i] = p[i] >= 0.5 ? 1.0 - p[i] : p[i];
  return s;
}

/// One draw of d_H(x, z). Candidates are generated at rate s_max with
/// geometric skips and kept with probability s_i / s_max.
std::uint64_t sample_mismatches(const std::vector<double>& s, double s_max, double log_miss, RandomSource& rng) {
  std::uint64_t count = 0;
  if (s_max <= 0.0) return 0;
  if (s_max > 0.25) {
    for (double si : s) count += rng.bernoulli(si);
    return count;
  }
  const std::size_t n = s.size();
  std::size_t pos = 0;
  while (true) {
    const double skip = std::floor(std::log1p(-rng.uniform()) / log_miss);
    if (skip >= static_cast<double>(n - pos)) break;
    pos += static_cast<std::size_t>(skip);
    if (s[pos] == s_max || rng.uniform() * s_max < s[pos]) ++count;
    if (++pos >= n) break;
  }
  return count;
}

constexpr std::uint64_t kChunks = 64;

} // namespace

BitString round_center(const UnivariateModel& p) {
  std::vector<std::uint8_t> z(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) z[i] = std::floor(0.5 + p[i]) >= 1.0 ? 1 : 0;
  return BitString(std::move(z));
}

double univariate_optimum_probability(const UnivariateModel& p) {
  require_even(p, "univariate_optimum_probability");
  double prob = 1.0;
  for (std::size_t i = 0; i < p.size(); i += 2) prob *= p[i] * p[i + 1] + (1.0 - p[i]) * (1.0 - p[i + 1]);
  return prob;
}

double log_univariate_optimum_probability(const UnivariateModel& p) {
  require_even(p, "log_univariate_optimum_probability");
  double log_prob = 0.0;
  for (std::size_t i = 0; i < p.size(); i += 2) {
    log_prob += std::log(p[i] * p[i + 1] + (1.0 - p[i]) * (1.0 - p[i + 1]));
  }
  return log_prob;
}

double expected_hamming_to_center(const UnivariateModel& p) {
  const BitString z = round_center(p);
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) sum += std::abs(p[i] - (z[i] ? 1.0 : 0.0));
  return sum;
}

double optimum_probability_upper_bound(const UnivariateModel& p) {
  return std::exp(-expected_hamming_to_center(p) / 2.0);
}

std::vector<double> hamming_distance_pmf(const UnivariateModel& p) {
  const auto s = mismatch_probabilities(p);
  std::vector<double> pmf(s.size() + 1, 0.0);
  pmf[0] = 1.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t d = i + 1; d > 0; --d) pmf[d] = pmf[d] * (1.0 - s[i]) + pmf[d - 1] * s[i];
    pmf[0] *= 1.0 - s[i];
  }
  return pmf;
}

double exact_hamming_tail(const UnivariateModel& p, double radius) {
  const auto pmf = hamming_distance_pmf(p);
  double tail = 0.0;
  for (std::size_t d = pmf.size(); d-- > 0;) {
    if (static_cast<double>(d) < radius) break;
    tail += pmf[d];
  }
  return std::min(tail, 1.0);
}

UnivariateTheoremReport verify_tail_bound(const UnivariateModel& p, double gamma, std::uint64_t trials,
                                          RandomSource& rng, std::size_t workers) {
  require_even(p, "verify_tail_bound");
  if (!(gamma > 0.0)) throw std::invalid_argument("verify_tail_bound: gamma must be positive");
  if (trials == 0) throw std::invalid_argument("verify_tail_bound: trials must be positive");
  if (p.size() < 2) throw std::invalid_argument("verify_tail_bound: n must be at least 2");

  UnivariateTheoremReport r;
  r.n = p.size();
  const double ln_n = std::log(static_cast<double>(r.n));
  r.log_optimum_probability = log_univariate_optimum_probability(p);
  r.optimum_probability = std::exp(r.log_optimum_probability);
  r.negligible_optimum_probability = !std::isfinite(r.log_optimum_probability);
  r.k_implied = r.negligible_optimum_probability ? std::numeric_limits<double>::infinity()
                                                 : std::max(0.0, -r.log_optimum_probability / ln_n);
  r.l1_distance = expected_hamming_to_center(p);
  r.expected_hamming = r.l1_distance;
  r.gamma = gamma;
  r.radius = gamma * ln_n;
  r.trials = trials;
  r.tail_bound = std::exp(-gamma / 6.0 * ln_n);
  r.tail_exact = exact_hamming_tail(p, r.radius);
  r.precondition_violated = !(gamma >= 4.0 * r.k_implied);

  const auto s = mismatch_probabilities(p);
  const double s_max = *std::max_element(s.begin(), s.end());
  const double log_miss = std::log1p(-s_max);
  const std::uint64_t base_seed = rng.next();

  std::atomic<std::uint64_t> next_chunk{0};
  std::atomic<std::uint64_t> hits{0};
  auto work = [&] {
    for (std::uint64_t c; (c = next_chunk.fetch_add(1)) < kChunks;) {
      RandomSource sub(derive_seed(base_seed, c));
      const std::uint64_t begin = trials * c / kChunks;
      const std::uint64_t end = trials * (c + 1) / kChunks;
      std::uint64_t local = 0;
      for (std::uint64_t t = begin; t < end; ++t) {
        local += static_cast<double>(sample_mismatches(s, s_max, log_miss, sub)) >= r.radius;
      }
      hits += local;
    }
  };
  workers = std::max<std::size_t>(1, workers);
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  r.tail_hits = hits.load();
  r.tail_empirical = static_cast<double>(r.tail_hits) / static_cast<double>(trials);
  r.tail_standard_error = std::sqrt(r.tail_bound * (1.0 - r.tail_bound) / static_cast<double>(trials));
  r.holds = r.tail_empirical <= r.tail_bound + 3.0 * r.tail_standard_error;
  return r;
}

BigInt distinct_optima_ceiling(double k, std::size_t n) {
  using Float = boost::multiprecision::cpp_bin_float_100;
  if (!(k >= 0.0) || !std::isfinite(k)) throw std::invalid_argument("distinct_optima_ceiling: k must be finite and non-negative");
  if (n == 0) throw std::invalid_argument("distinct_optima_ceiling: n must be positive");
  const Float exponent = Float(k) * log(Float(4));
  const Float value = ceil(pow(Float(n), exponent));
  return value.convert_to<BigInt>();
}

} // namespace mimic
