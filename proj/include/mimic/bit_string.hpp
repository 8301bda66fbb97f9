#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace mimic {

/// Fixed-length bit string. Positions are 0-based in the API; anything
/// written to disk uses 1-based positions.
class BitString {
public:
  explicit BitString(std::size_t n, bool value = false);
  explicit BitString(std::vector<std::uint8_t> bits);

  /// Parses a string of '0'/'1' characters, e.g. "0011".
  static BitString parse(std::string_view text);

  std::size_t size() const noexcept { return bits_.size(); }
  bool operator[](std::size_t i) const noexcept { return bits_[i] != 0; }
  bool at(std::size_t i) const;

  void set(std::size_t i, bool value);
  void flip(std::size_t i);

  std::string to_string() const;

  /// Dense byte packing (8 bits per byte), suitable as a hash key.
  std::string packed() const;

  friend bool operator==(const BitString&, const BitString&) = default;

private:
  std::vector<std::uint8_t> bits_;
};

std::size_t hamming_distance(const BitString& a, const BitString& b);

} // namespace mimic
