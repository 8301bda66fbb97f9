#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "mimic/fitness.hpp"
#include "mimic/theory.hpp"

using namespace mimic;

namespace {

BitString from_mask(std::uint32_t mask, std::size_t n) {
  BitString x(n);
  for (std::size_t i = 0; i < n; ++i) x.set(i, (mask >> i) & 1u);
  return x;
}

UnivariateModel random_p(std::size_t n, RandomSource& rng) {
  std::vector<double> p(n);
  for (auto& v : p) v = rng.uniform();
  return UnivariateModel(std::move(p));
}

/// Near-deterministic per block: each block centred on 00 or 11, noise up to `spread / n`.
UnivariateModel concentrated_p(std::size_t n, double spread, RandomSource& rng) {
  std::vector<double> p(n);
  for (std::size_t j = 0; j < n / 2; ++j) {
    const bool one = rng.bernoulli(0.5);
    for (std::size_t i = 2 * j; i < 2 * j + 2; ++i) {
      const double eps = std::min(0.5, rng.uniform() * spread / static_cast<double>(n));
      p[i] = one ? 1.0 - eps : eps;
    }
  }
  return UnivariateModel(std::move(p));
}

} // namespace

TEST_CASE("round_center") {
  CHECK(round_center(UnivariateModel(std::vector<double>(5, 0.9))) == BitString(5, true));
  CHECK(round_center(UnivariateModel({0.5})) == BitString::parse("1"));
  CHECK(round_center(UnivariateModel({0.1, 0.6, 0.49, 0.51})) == BitString::parse("0101"));
}

TEST_CASE("univariate optimum probability") {
  CHECK(univariate_optimum_probability(UnivariateModel(std::vector<double>(4, 0.5))) == 0.25);
  CHECK(univariate_optimum_probability(UnivariateModel({0, 0, 1, 1, 0, 0})) == 1.0);
  CHECK_THROWS_AS(univariate_optimum_probability(UnivariateModel({0.5, 0.5, 0.5})), std::invalid_argument);

  RandomSource rng(1);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 2 * (1 + rng.below(5));
    const auto p = random_p(n, rng);
    double brute = 0.0;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      const auto y = from_mask(mask, n);
      if (is_ebom_optimum(y)) brute += exact_probability(p, y);
    }
    CHECK(std::abs(univariate_optimum_probability(p) - brute) <= 1e-12);
    CHECK(std::abs(std::exp(log_univariate_optimum_probability(p)) - brute) <= 1e-12);
  }
}

TEST_CASE("optimum probability is multiplicative over block groups") {
  RandomSource rng(2);
  for (int rep = 0; rep < 100; ++rep) {
    const auto a = random_p(2 * (1 + rng.below(10)), rng);
    const auto b = random_p(2 * (1 + rng.below(10)), rng);
    std::vector<double> joined(a.freqs().begin(), a.freqs().end());
    joined.insert(joined.end(), b.freqs().begin(), b.freqs().end());
    const double whole = univariate_optimum_probability(UnivariateModel(joined));
    CHECK(whole <= 1.0);
    CHECK(whole == doctest::Approx(univariate_optimum_probability(a) * univariate_optimum_probability(b)).epsilon(1e-12));
  }
}

TEST_CASE("expected Hamming distance to the center") {
  CHECK(expected_hamming_to_center(UnivariateModel(std::vector<double>(10, 0.5))) == 5.0);
  CHECK(expected_hamming_to_center(UnivariateModel({0, 1, 1, 0})) == 0.0);

  RandomSource rng(3);
  for (std::size_t n : {20u, 50u}) {
    for (int rep = 0; rep < 100; ++rep) {
      const auto p = random_p(n, rng);
      const auto z = round_center(p);
      const double mean = expected_hamming_to_center(p);
      double var = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double s = std::abs(p[i] - (z[i] ? 1.0 : 0.0));
        var += s * (1.0 - s);
      }
      const std::size_t samples = rep < 5 ? 100000 : 5000;
      double total = 0.0;
      for (std::size_t k = 0; k < samples; ++k) total += static_cast<double>(hamming_distance(sample_univariate(p, rng), z));
      CHECK(std::abs(total / samples - mean) <= 4.0 * std::sqrt(var / samples));
    }
  }
}

TEST_CASE("exact Hamming law matches enumeration") {
  RandomSource rng(4);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t n = 1 + rng.below(10);
    const auto p = random_p(n, rng);
    const auto z = round_center(p);
    std::vector<double> brute(n + 1, 0.0);
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      const auto y = from_mask(mask, n);
      brute[hamming_distance(y, z)] += exact_probability(p, y);
    }
    const auto pmf = hamming_distance_pmf(p);
    for (std::size_t d = 0; d <= n; ++d) CHECK(std::abs(pmf[d] - brute[d]) <= 1e-12);
  }
}

TEST_CASE("proof inequality Pr[E] <= exp(-||p - z||_1 / 2)") {
  RandomSource rng(5);
  for (int rep = 0; rep < 10000; ++rep) {
    const std::size_t n = 2 * (1 + rng.below(100));
    const auto p = rep % 2 ? random_p(n, rng) : concentrated_p(n, 1 + 10 * rng.uniform(), rng);
    CHECK(log_univariate_optimum_probability(p) <= -expected_hamming_to_center(p) / 2.0 + 1e-12);
  }
}

TEST_CASE("tail bound on near-deterministic blockwise models") {
  RandomSource rng(6);
  for (std::size_t n : {50u, 100u, 200u}) {
    std::vector<double> p(n);
    const double eps = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = (i / 2) % 2 == 0 ? eps : 1.0 - eps;
    const UnivariateModel model(p);
    const auto r = verify_tail_bound(model, 6.0, 1000000, rng);
    CHECK(r.optimum_probability >= 1.0 / n);
    CHECK(r.k_implied <= 1.0);
    CHECK_FALSE(r.precondition_violated);
    CHECK(r.holds);
    CHECK(r.tail_empirical <= 1.0 / n);
    CHECK(r.l1_distance == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.expected_hamming == r.l1_distance);
  }
}

TEST_CASE("tail bound edge cases") {
  RandomSource rng(7);
  const auto det = verify_tail_bound(UnivariateModel({0, 0, 1, 1, 0, 0, 1, 1}), 0.5, 10000, rng);
  CHECK(det.tail_empirical == 0.0);
  CHECK(det.holds);
  CHECK(det.k_implied == 0.0);

  const auto uniform = verify_tail_bound(UnivariateModel(std::vector<double>(100, 0.5)), 6.0, 10000, rng);
  CHECK(uniform.k_implied == doctest::Approx(50.0 * std::log(2.0) / std::log(100.0)).epsilon(1e-12));
  CHECK(uniform.k_implied == doctest::Approx(7.5257498916).epsilon(1e-9));
  CHECK(uniform.precondition_violated);

  // A block with opposite certain bits: no optimum can be sampled at all.
  const auto none = verify_tail_bound(UnivariateModel({0, 1, 0.5, 0.5}), 1.0, 1000, rng);
  CHECK(none.negligible_optimum_probability);
  CHECK(none.precondition_violated);

  CHECK_THROWS_AS(verify_tail_bound(UnivariateModel({0.5, 0.5}), 0.0, 10, rng), std::invalid_argument);
}

TEST_CASE("Monte Carlo tail agrees with the exact law; worker count does not matter") {
  RandomSource gen(8);
  for (int rep = 0; rep < 10; ++rep) {
    const std::size_t n = 100;
    const auto p = concentrated_p(n, 8.0, gen);
    const double gamma = 0.5 + gen.uniform();
    RandomSource a(rep), b(rep);
    const auto one = verify_tail_bound(p, gamma, 200000, a, 1);
    const auto four = verify_tail_bound(p, gamma, 200000, b, 4);
    CHECK(one.tail_hits == four.tail_hits);
    const double se = std::sqrt(one.tail_exact * (1 - one.tail_exact) / 200000.0);
    CHECK(std::abs(one.tail_empirical - one.tail_exact) <= 4 * se + 1e-9);
  }
  // Above the thinning threshold the per-bit path is used.
  const UnivariateModel wide(std::vector<double>(40, 0.3));
  RandomSource c(1);
  const auto r = verify_tail_bound(wide, 4.0, 200000, c);
  const double se = std::sqrt(r.tail_exact * (1 - r.tail_exact) / 200000.0);
  CHECK(std::abs(r.tail_empirical - r.tail_exact) <= 4 * se + 1e-9);
}

TEST_CASE("distinct optima ceiling") {
  // 100^(ln 4) = 592.364...
  CHECK(distinct_optima_ceiling(1.0, 100) == 593);
  CHECK(std::exp(std::log(4.0) * std::log(100.0)) == doctest::Approx(592.364088875819).epsilon(1e-12));
  CHECK(distinct_optima_ceiling(0.0, 100) == 1);
  CHECK(distinct_optima_ceiling(1e-9, 100) == 2);
  CHECK(distinct_optima_ceiling(2.0, 200) == BigInt(static_cast<long long>(std::ceil(std::pow(200.0, 2 * std::log(4.0))))));
  CHECK_THROWS_AS(distinct_optima_ceiling(-1.0, 10), std::invalid_argument);
}
