#include "mimic/model.hpp"

#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "mimic/io.hpp"

namespace mimic {

ChainModel::ChainModel(std::vector<std::size_t> order, std::vector<CondProbs> probs)
    : order_(std::move(order)), probs_(std::move(probs)) {
  const std::size_t n = order_.size();
  if (n == 0) throw std::invalid_argument("ChainModel: empty model");
  if (probs_.size() != n) throw std::invalid_argument("ChainModel: order and probability sizes differ");
  std::vector<bool> seen(n, false);
  for (auto pos : order_) {
    if (pos >= n || seen[pos]) throw std::invalid_argument("ChainModel: order is not a permutation");
    seen[pos] = true;
  }
  for (const auto& p : probs_) {
    for (double e : p) {
      if (!(e >= 0.0 && e <= 1.0)) throw std::invalid_argument("ChainModel: probability outside [0, 1]");
    }
  }
  const auto& head = probs_[order_.front()];
  if (head[0] != head[1]) {
    throw std::invalid_argument("ChainModel: first position in the order must have equal entries");
  }
}

ChainModel initial_model(std::size_t n) {
  if (n < 2) throw std::invalid_argument("initial_model: n must be at least 2");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  return ChainModel(std::move(order), std::vector<CondProbs>(n, CondProbs{0.5, 0.5}));
}

BitString sample_chain(const ChainModel& model, RandomSource& rng) {
  const auto order = model.order();
  const auto probs = model.probs();
  std::vector<std::uint8_t> bits(model.size());
  std::size_t prev = 0;
  for (auto pos : order) {
    const std::uint8_t b = rng.bernoulli(probs[pos][prev]) ? 1 : 0;
    bits[pos] = b;
    prev = b;
  }
  return BitString(std::move(bits));
}

double exact_probability(const ChainModel& model, const BitString& y) {
  if (y.size() != model.size()) throw std::invalid_argument("exact_probability: length mismatch");
  double p = 1.0;
  std::size_t prev = 0;
  for (auto pos : model.order()) {
    const double one = model.probs_at(pos)[prev];
    p *= y[pos] ? one : 1.0 - one;
    prev = y[pos] ? 1 : 0;
  }
  return p;
}

UnivariateModel::UnivariateModel(std::vector<double> freqs) : freqs_(std::move(freqs)) {
  if (freqs_.empty()) throw std::invalid_argument("UnivariateModel: empty frequency vector");
  for (double p : freqs_) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("UnivariateModel: frequency outside [0, 1]");
  }
}

BitString sample_univariate(const UnivariateModel& model, RandomSource& rng) {
  std::vector<std::uint8_t> bits(model.size());
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = rng.bernoulli(model[i]) ? 1 : 0;
  return BitString(std::move(bits));
}

double exact_probability(const UnivariateModel& model, const BitString& y) {
  if (y.size() != model.size()) throw std::invalid_argument("exact_probability: length mismatch");
  double p = 1.0;
  for (std::size_t i = 0; i < y.size(); ++i) p *= y[i] ? model[i] : 1.0 - model[i];
  return p;
}

void write_snapshot(std::ostream& out, const ChainModel& model) {
  out << "pi_rank,position,P_given_0,P_given_1\n";
  const auto order = model.order();
  for (std::size_t r = 0; r < order.size(); ++r) {
    const auto& p = model.probs_at(order[r]);
    out << (r + 1) << ',' << (order[r] + 1) << ',' << format_double(p[0]) << ',' << format_double(p[1]) << '\n';
  }
}

ChainModel read_snapshot(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "pi_rank,position,P_given_0,P_given_1") {
    throw std::runtime_error("read_snapshot: missing or unexpected header");
  }
  std::vector<std::size_t> order;
  std::vector<std::pair<std::size_t, CondProbs>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 4) throw std::runtime_error("read_snapshot: expected 4 fields in '" + line + "'");
    const auto rank = parse_unsigned(fields[0]);
    if (rank != order.size() + 1) throw std::runtime_error("read_snapshot: ranks must be consecutive from 1");
    const auto position = parse_unsigned(fields[1]);
    if (position == 0) throw std::runtime_error("read_snapshot: positions are 1-based");
    order.push_back(position - 1);
    rows.push_back({position - 1, CondProbs{parse_double(fields[2]), parse_double(fields[3])}});
  }
  std::vector<CondProbs> probs(order.size(), CondProbs{0.0, 0.0});
  for (const auto& [pos, p] : rows) {
    if (pos >= probs.size()) throw std::runtime_error("read_snapshot: position out of range");
    probs[pos] = p;
  }
  return ChainModel(std::move(order), std::move(probs));
}

} // namespace mimic
