#include "mimic/builder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace mimic {

MimicParams MimicParams::scaled(std::size_t n, double lambda_factor, std::size_t mu_divisor) {
  if (n < 2) throw std::invalid_argument("MimicParams: n must be at least 2");
  if (mu_divisor == 0) throw std::invalid_argument("MimicParams: mu divisor must be positive");
  MimicParams p;
  p.n = n;
  const double nd = static_cast<double>(n);
  p.lambda = static_cast<std::size_t>(std::floor(lambda_factor * nd * std::log(nd)));
  p.mu = p.lambda / mu_divisor;
  p.validate();
  return p;
}

void MimicParams::validate() const {
  if (n < 2) throw std::invalid_argument("MimicParams: n must be at least 2");
  if (mu == 0) throw std::invalid_argument("MimicParams: mu must be positive");
  if (mu > lambda) throw std::invalid_argument("MimicParams: mu must not exceed lambda");
}

Population truncation_select(const Population& offspring, const FitnessFunction& f, std::size_t mu, RandomSource& rng) {
  if (offspring.size() < mu) throw std::invalid_argument("truncation_select: population smaller than mu");
  std::vector<double> fitness;
  if (offspring.has_fitness()) {
    fitness.assign(offspring.fitness().begin(), offspring.fitness().end());
  } else {
    fitness.reserve(offspring.size());
    for (const auto& x : offspring.members()) fitness.push_back(f.evaluate(x));
  }

  // Random shuffle, then a stable sort: equal-fitness members end up in
  // uniformly random relative order.
  std::vector<std::size_t> idx(offspring.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  rng.shuffle(std::span<std::size_t>(idx));
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return fitness[a] > fitness[b]; });

  std::vector<BitString> members;
  std::vector<double> kept;
  members.reserve(mu);
  kept.reserve(mu);
  for (std::size_t k = 0; k < mu; ++k) {
    members.push_back(offspring[idx[k]]);
    kept.push_back(fitness[idx[k]]);
  }
  return Population(std::move(members), std::move(kept));
}

namespace {

/// Index into `candidates` of a uniformly chosen minimizer of `score`.
std::size_t pick_minimizer(const std::vector<double>& score, RandomSource& rng) {
  const double best = *std::min_element(score.begin(), score.end());
  std::vector<std::size_t> ties;
  for (std::size_t k = 0; k < score.size(); ++k) {
    if (score[k] == best) ties.push_back(k);
  }
  return ties.size() == 1 ? ties.front() : ties[rng.below(ties.size())];
}

} // namespace

ChainModel build_model(const Population& selected, const MimicParams& params, RandomSource& rng) {
  if (selected.empty()) throw std::invalid_argument("build_model: empty population");
  const std::size_t n = selected.length();
  if (n != params.n) throw std::invalid_argument("build_model: population length differs from params.n");

  const ColumnIndex columns(selected);
  std::vector<std::size_t> remaining(n);
  std::iota(remaining.begin(), remaining.end(), std::size_t{0});
  std::vector<std::size_t> order;
  order.reserve(n);
  std::vector<CondProbs> probs(n, CondProbs{0.5, 0.5});
  std::vector<double> score;
  score.reserve(n);

  for (auto i : remaining) score.push_back(entropy_from_counts(columns.ones(i), columns.members()));
  std::size_t k = pick_minimizer(score, rng);
  std::size_t prev = remaining[k];
  remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(k));
  order.push_back(prev);
  const double head = static_cast<double>(columns.ones(prev)) / static_cast<double>(columns.members());
  probs[prev] = CondProbs{head, head};

  std::vector<PairCounts> counts;
  counts.reserve(n);
  while (!remaining.empty()) {
    score.clear();
    counts.clear();
    for (auto i : remaining) {
      counts.push_back(columns.pair_counts(i, prev));
      score.push_back(cond_entropy_from_counts(counts.back()));
    }
    k = pick_minimizer(score, rng);
    const std::size_t next = remaining[k];
    probs[next] = CondProbs{cond_freq_from_counts(counts[k], true, false), cond_freq_from_counts(counts[k], true, true)};
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(k));
    order.push_back(next);
    prev = next;
  }
  return clamp(ChainModel(std::move(order), std::move(probs)), n);
}

ChainModel clamp(const ChainModel& model, std::size_t n) {
  if (n == 0) throw std::invalid_argument("clamp: n must be positive");
  const double lo = 1.0 / static_cast<double>(n);
  const double hi = 1.0 - lo;
  std::vector<CondProbs> probs(model.probs().begin(), model.probs().end());
  for (auto& p : probs) {
    for (auto& e : p) e = std::min(std::max(e, lo), hi);
  }
  return ChainModel(std::vector<std::size_t>(model.order().begin(), model.order().end()), std::move(probs));
}

IterationResult mimic_iteration(const ChainModel& model, const FitnessFunction& f, const MimicParams& params,
                                RandomSource& rng) {
  params.validate();
  if (model.size() != params.n || f.dimension() != params.n) {
    throw std::invalid_argument("mimic_iteration: model, fitness and params disagree on n");
  }
  const auto optimum = f.optimum_value();

  std::vector<BitString> samples;
  std::vector<double> fitness;
  samples.reserve(params.lambda);
  fitness.reserve(params.lambda);
  IterationStats stats;
  stats.best_fitness = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < params.lambda; ++k) {
    samples.push_back(sample_chain(model, rng));
    const double v = f.evaluate(samples.back());
    fitness.push_back(v);
    stats.best_fitness = std::max(stats.best_fitness, v);
    if (optimum && v == *optimum) ++stats.optimum_count;
  }
  Population offspring(std::move(samples), std::move(fitness));

  const Population selected = truncation_select(offspring, f, params.mu, rng);
  ChainModel next = build_model(selected, params, rng);
  return IterationResult{std::move(next), std::move(offspring), stats};
}

} // namespace mimic
