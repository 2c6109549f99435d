#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dicka/errors.hpp"

namespace dicka {

/// Packed bit string over GF(2).
///
/// Bit i lives in word i / 64 at position i % 64 (little-endian within
/// words). Bits past size() are kept at zero so word-level equality and
/// parity are exact. The hex form lists bytes in order, byte k holding bits
/// 8k..8k+7 with bit 8k as its least significant bit.
class BitString {
 public:
  BitString() = default;
  explicit BitString(std::size_t n) : size_(n), words_((n + 63) / 64, 0) {}

  /// Parses a string of '0'/'1' characters, first character is bit 0.
  static BitString from_bits(std::string_view bits) {
    BitString out(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
      if (bits[i] == '1') {
        out.set(i, true);
      } else if (bits[i] != '0') {
        throw InvalidInput("bit string may only contain '0' and '1'");
      }
    }
    return out;
  }

  static BitString from_hex(std::string_view hex, std::size_t n) {
    if (hex.size() != 2 * ((n + 7) / 8)) {
      throw LengthMismatch("hex length " + std::to_string(hex.size()) +
                           " does not encode " + std::to_string(n) + " bits");
    }
    BitString out(n);
    for (std::size_t byte = 0; byte < hex.size() / 2; ++byte) {
      const unsigned v = (nibble(hex[2 * byte]) << 4) | nibble(hex[2 * byte + 1]);
      for (unsigned b = 0; b < 8; ++b) {
        const std::size_t i = 8 * byte + b;
        if ((v >> b) & 1U) {
          if (i >= n) throw InvalidInput("nonzero padding bits in hex string");
          out.set(i, true);
        }
      }
    }
    return out;
  }

  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }

  bool operator[](std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1U; }

  void set(std::size_t i, bool v) {
    const std::uint64_t mask = std::uint64_t{1} << (i % 64);
    if (v) {
      words_[i / 64] |= mask;
    } else {
      words_[i / 64] &= ~mask;
    }
  }

  void flip(std::size_t i) { words_[i / 64] ^= std::uint64_t{1} << (i % 64); }

  void push_back(bool v) {
    if (size_ % 64 == 0) words_.push_back(0);
    ++size_;
    set(size_ - 1, v);
  }

  std::size_t count() const noexcept {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }

  bool parity() const noexcept { return (count() & 1U) != 0; }

  BitString& operator^=(const BitString& other) {
    if (other.size_ != size_) throw LengthMismatch("xor of bit strings with different lengths");
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] ^= other.words_[w];
    return *this;
  }
  friend BitString operator^(BitString a, const BitString& b) { return a ^= b; }

  friend bool operator==(const BitString&, const BitString&) = default;

  /// 64 bits starting at bit `pos`; bits beyond size() read as zero.
  std::uint64_t window64(std::size_t pos) const noexcept {
    const std::size_t w = pos / 64;
    const unsigned off = pos % 64;
    if (w >= words_.size()) return 0;
    std::uint64_t lo = words_[w] >> off;
    if (off != 0 && w + 1 < words_.size()) lo |= words_[w + 1] << (64 - off);
    return lo;
  }

  const std::vector<std::uint64_t>& words() const noexcept { return words_; }

  std::string to_bits() const {
    std::string s(size_, '0');
    for (std::size_t i = 0; i < size_; ++i) {
      if ((*this)[i]) s[i] = '1';
    }
    return s;
  }

  std::string to_hex() const {
    static constexpr char digits[] = "0123456789abcdef";
    const std::size_t n_bytes = (size_ + 7) / 8;
    std::string s;
    s.reserve(2 * n_bytes);
    for (std::size_t byte = 0; byte < n_bytes; ++byte) {
      const auto v = static_cast<unsigned>((words_[byte / 8] >> (8 * (byte % 8))) & 0xFFU);
      s.push_back(digits[v >> 4]);
      s.push_back(digits[v & 0xFU]);
    }
    return s;
  }

 private:
  static unsigned nibble(char c) {
    if (c >= '0' && c <= '9') return static_cast<unsigned>(c - '0');
    if (c >= 'a' && c <= 'f') return static_cast<unsigned>(c - 'a' + 10);
    throw InvalidInput(std::string("invalid lowercase hex digit '") + c + "'");
  }

  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace dicka
