#pragma once

#include <cstdint>
#include <random>

namespace dicka {

// Stateless 64-bit mixer (SplitMix64 finalizer). Used only to derive
// independent child seeds; the stream itself is std::mt19937_64, whose
// output sequence is fixed by the standard.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Named substreams of a protocol run.
enum class Stream : std::uint64_t {
  rounds = 1,
  error_correction = 2,
  privacy_amplification = 3,
  test_harness = 99,
};

/// Seedable, splittable deterministic random stream.
///
/// Every draw is built from raw 64-bit engine words with fixed arithmetic,
/// never through std::*_distribution, so transcripts are reproducible across
/// standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(mix64(seed)) {}

  std::uint64_t seed() const noexcept { return seed_; }

  /// Child stream identified by (stream, index); independent of how much of
  /// this stream has been consumed.
  Rng split(Stream stream, std::uint64_t index = 0) const {
    return split(static_cast<std::uint64_t>(stream), index);
  }
  Rng split(std::uint64_t stream, std::uint64_t index = 0) const {
    return Rng(mix64(mix64(seed_ ^ mix64(stream)) + index));
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bit() { return (engine_() >> 63) != 0; }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace dicka
