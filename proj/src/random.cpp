#include "mimic/random.hpp"

#include <limits>
#include <stdexcept>

namespace mimic {

std::size_t RandomSource::below(std::size_t bound) {
  if (bound == 0) throw std::invalid_argument("RandomSource::below: bound must be positive");
  const std::uint64_t b = bound;
  // Rejection on the largest multiple of b keeps the draw exactly uniform.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % b;
  std::uint64_t x;
  do {
    x = next();
  } while (x >= limit);
  return static_cast<std::size_t>(x % b);
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
  return mix64(mix64(mix64(master) ^ a) ^ (b * 0x9e3779b97f4a7c15ULL + 1));
}

} // namespace mimic
