#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

#include "mimic/bit_string.hpp"

namespace mimic {

using BigInt = boost::multiprecision::cpp_int;

/// Pseudo-Boolean objective to be maximized. Implementations must be pure and
/// callable concurrently.
class FitnessFunction {
public:
  virtual ~FitnessFunction() = default;

  virtual std::size_t dimension() const noexcept = 0;
  virtual double evaluate(const BitString& x) const = 0;

  /// Known global maximum, if any. Used by the runner to detect optima.
  virtual std::optional<double> optimum_value() const { return std::nullopt; }

  virtual std::string name() const = 0;

  bool is_optimum(const BitString& x) const {
    auto best = optimum_value();
    return best && evaluate(x) == *best;
  }
};

/// EqualBlocksOneMax: number of blocks (2j, 2j+1) whose two bits agree.
class EqualBlocksOneMax final : public FitnessFunction {
public:
  explicit EqualBlocksOneMax(std::size_t n);

  std::size_t dimension() const noexcept override { return n_; }
  double evaluate(const BitString& x) const override;
  std::optional<double> optimum_value() const override { return static_cast<double>(n_ / 2); }
  std::string name() const override { return "ebom"; }

private:
  std::size_t n_;
};

/// Count of correct blocks. x must have even length.
std::size_t ebom(const BitString& x);

/// ebom(x) == |x| / 2.
bool is_ebom_optimum(const BitString& x);

/// Exactly 2^(n/2).
BigInt count_optima(std::size_t n);

} // namespace mimic
