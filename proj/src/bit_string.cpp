#include "mimic/bit_string.hpp"

#include <stdexcept>

namespace mimic {

BitString::BitString(std::size_t n, bool value) : bits_(n, value ? 1 : 0) {
  if (n == 0) throw std::invalid_argument("BitString: length must be positive");
}

BitString::BitString(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  if (bits_.empty()) throw std::invalid_argument("BitString: length must be positive");
  for (auto b : bits_) {
    if (b > 1) throw std::invalid_argument("BitString: elements must be 0 or 1");
  }
}

BitString BitString::parse(std::string_view text) {
  std::vector<std::uint8_t> bits;
  bits.reserve(text.size());
  for (char c : text) {
    if (c != '0' && c != '1') {
      throw std::invalid_argument("BitString::parse: unexpected character '" + std::string(1, c) + "'");
    }
    bits.push_back(c == '1' ? 1 : 0);
  }
  return BitString(std::move(bits));
}

bool BitString::at(std::size_t i) const {
  if (i >= bits_.size()) throw std::out_of_range("BitString::at: position out of range");
  return bits_[i] != 0;
}

void BitString::set(std::size_t i, bool value) {
  if (i >= bits_.size()) throw std::out_of_range("BitString::set: position out of range");
  bits_[i] = value ? 1 : 0;
}

void BitString::flip(std::size_t i) {
  if (i >= bits_.size()) throw std::out_of_range("BitString::flip: position out of range");
  bits_[i] ^= 1;
}

std::string BitString::to_string() const {
  std::string s(bits_.size(), '0');
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (bits_[i]) s[i] = '1';
  }
  return s;
}

std::string BitString::packed() const {
  std::string key((bits_.size() + 7) / 8, '\0');
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (bits_[i]) key[i / 8] = static_cast<char>(key[i / 8] | (1 << (i % 8)));
  }
  return key;
}

std::size_t hamming_distance(const BitString& a, const BitString& b) {
  if (a.size() != b.size()) throw std::invalid_argument("hamming_distance: length mismatch");
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] != b[i]);
  return d;
}

} // namespace mimic
