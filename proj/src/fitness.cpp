#include "mimic/fitness.hpp"

#include <stdexcept>

namespace mimic {

namespace {

void require_even(std::size_t n, const char* where) {
  if (n < 2 || n % 2 != 0) {
    throw std::invalid_argument(std::string(where) + ": length must be even and at least 2, got " + std::to_string(n));
  }
}

} // namespace

EqualBlocksOneMax::EqualBlocksOneMax(std::size_t n) : n_(n) { require_even(n, "EqualBlocksOneMax"); }

double EqualBlocksOneMax::evaluate(const BitString& x) const {
  if (x.size() != n_) throw std::invalid_argument("EqualBlocksOneMax: dimension mismatch");
  return static_cast<double>(ebom(x));
}

std::size_t ebom(const BitString& x) {
  require_even(x.size(), "ebom");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < x.size(); i += 2) correct += (x[i] == x[i + 1]);
  return correct;
}

bool is_ebom_optimum(const BitString& x) { return ebom(x) == x.size() / 2; }

BigInt count_optima(std::size_t n) {
  require_even(n, "count_optima");
  BigInt one = 1;
  return one << (n / 2);
}

} // namespace mimic
