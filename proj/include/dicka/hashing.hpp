#pragma once

// Toeplitz two-universal hashing over GF(2), used both for error-correction
// verification tags and for privacy amplification.

#include <bit>
#include <cstddef>
#include <string>

#include "dicka/bitstring.hpp"
#include "dicka/errors.hpp"
#include "dicka/rng.hpp"

namespace dicka::hashing {

/// Toeplitz matrix T (out_len x in_len) given by its diagonals:
/// T[j][i] = diagonal_bits[j - i + in_len - 1].
struct ToeplitzSeed {
  std::size_t in_len = 0;
  std::size_t out_len = 0;
  BitString diagonal_bits;

  static std::size_t diagonal_length(std::size_t in_len, std::size_t out_len) {
    return in_len + out_len == 0 ? 0 : in_len + out_len - 1;
  }

  ToeplitzSeed() = default;
  ToeplitzSeed(std::size_t in, std::size_t out, BitString diag)
      : in_len(in), out_len(out), diagonal_bits(std::move(diag)) {
    if (out_len > in_len) throw LengthMismatch("Toeplitz output longer than input");
    if (diagonal_bits.size() != diagonal_length(in_len, out_len)) {
      throw LengthMismatch("Toeplitz diagonal must have in_len + out_len - 1 bits");
    }
  }

  static ToeplitzSeed random(std::size_t in, std::size_t out, Rng& rng) {
    BitString diag(diagonal_length(in, out));
    for (std::size_t i = 0; i < diag.size(); i += 64) {
      const std::uint64_t word = rng.next_u64();
      for (std::size_t b = 0; b < 64 && i + b < diag.size(); ++b) diag.set(i + b, (word >> b) & 1U);
    }
    return ToeplitzSeed(in, out, std::move(diag));
  }

  bool operator==(const ToeplitzSeed&) const = default;
};

inline BitString toeplitz_hash(const ToeplitzSeed& seed, const BitString& input) {
  if (input.size() != seed.in_len) {
    throw LengthMismatch("hash input has " + std::to_string(input.size()) + " bits, seed expects " +
                         std::to_string(seed.in_len));
  }
  // out_j = XOR_m d[j + m] & u[in_len - 1 - m]: a sliding window of the
  // diagonal against the reversed input.
  BitString reversed(input.size());
  for (std::size_t i = 0; i < input.size(); ++i) reversed.set(input.size() - 1 - i, input[i]);
  const auto& rw = reversed.words();

  BitString out(seed.out_len);
  for (std::size_t j = 0; j < seed.out_len; ++j) {
    std::uint64_t acc = 0;
    for (std::size_t w = 0; w < rw.size(); ++w) acc ^= seed.diagonal_bits.window64(j + 64 * w) & rw[w];
    out.set(j, (std::popcount(acc) & 1) != 0);
  }
  return out;
}

inline bool verify_hash(const ToeplitzSeed& seed, const BitString& candidate, const BitString& tag) {
  if (tag.size() != seed.out_len) throw LengthMismatch("tag length differs from seed output length");
  return toeplitz_hash(seed, candidate) == tag;
}

}  // namespace dicka::hashing
