#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "mimic/bit_string.hpp"
#include "mimic/fitness.hpp"
#include "mimic/model.hpp"
#include "mimic/random.hpp"

namespace mimic {

/// z_i = floor(1/2 + p_i), i.e. 1 iff p_i >= 1/2.
BitString round_center(const UnivariateModel& p);

/// Exact probability that a sample of p is an EBOM optimum:
/// prod_j (p_{2j} p_{2j+1} + (1 - p_{2j})(1 - p_{2j+1})).
double univariate_optimum_probability(const UnivariateModel& p);

/// Natural log of univariate_optimum_probability, summed blockwise so it stays
/// finite where the product underflows.
double log_univariate_optimum_probability(const UnivariateModel& p);

/// ||p - z||_1, the mean Hamming distance of a sample to round_center(p).
double expected_hamming_to_center(const UnivariateModel& p);

/// exp(-||p - z||_1 / 2), an upper bound on the optimum probability.
double optimum_probability_upper_bound(const UnivariateModel& p);

/// Exact law of d_H(x, z) for x ~ p (Poisson binomial, O(n^2) DP).
std::vector<double> hamming_distance_pmf(const UnivariateModel& p);

/// Pr[d_H(x, z) >= radius], from the exact law.
double exact_hamming_tail(const UnivariateModel& p, double radius);

struct UnivariateTheoremReport {
  std::size_t n = 0;
  double optimum_probability = 0.0;
  double log_optimum_probability = 0.0;
  double k_implied = 0.0; // Pr[E] = n^-k
  double l1_distance = 0.0;
  double expected_hamming = 0.0;
  double gamma = 0.0;
  double radius = 0.0; // gamma * ln n
  std::uint64_t trials = 0;
  std::uint64_t tail_hits = 0;
  double tail_empirical = 0.0;
  double tail_standard_error = 0.0; // binomial SE at the bound
  double tail_exact = 0.0;
  double tail_bound = 0.0; // n^(-gamma / 6)
  bool precondition_violated = false;      // gamma < 4k
  bool negligible_optimum_probability = false; // Pr[E] == 0, no finite k
  bool holds = false;                      // empirical <= bound + 3 SE
};

/// Monte Carlo check of Pr[d_H(x, z) >= gamma ln n] <= n^(-gamma/6). Trials
/// are split into fixed chunks with their own substreams, so the result does
/// not depend on `workers`.
UnivariateTheoremReport verify_tail_bound(const UnivariateModel& p, double gamma, std::uint64_t trials,
                                          RandomSource& rng, std::size_t workers = 1);

/// ceil(n^(k ln 4)): cap on optima inside a Hamming ball of radius 4k ln n.
BigInt distinct_optima_ceiling(double k, std::size_t n);

} // namespace mimic
