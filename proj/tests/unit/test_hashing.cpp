#include <gtest/gtest.h>

#include <cmath>

#include "dicka/hashing.hpp"

namespace h = dicka::hashing;
using dicka::BitString;
using dicka::Rng;

namespace {

// Direct matrix-vector product with T[j][i] = d[j - i + in_len - 1].
BitString naive_hash(const h::ToeplitzSeed& s, const BitString& u) {
  BitString out(s.out_len);
  for (std::size_t j = 0; j < s.out_len; ++j) {
    bool acc = false;
    for (std::size_t i = 0; i < s.in_len; ++i) acc ^= s.diagonal_bits[j + s.in_len - 1 - i] && u[i];
    out.set(j, acc);
  }
  return out;
}

BitString random_bits(std::size_t n, Rng& rng) {
  BitString b(n);
  for (std::size_t i = 0; i < n; ++i) b.set(i, rng.bit());
  return b;
}

}  // namespace

TEST(Toeplitz, ZeroSeedGivesZeroOutput) {
  const h::ToeplitzSeed s(5, 3, BitString(7));
  EXPECT_EQ(h::toeplitz_hash(s, BitString::from_bits("10111")), BitString(3));
}

TEST(Toeplitz, OneByOneIdentity) {
  const h::ToeplitzSeed s(1, 1, BitString::from_bits("1"));
  EXPECT_EQ(h::toeplitz_hash(s, BitString::from_bits("1")).to_bits(), "1");
}

TEST(Toeplitz, HandExpandedThreeByTwo) {
  // T = [[1,0,1],[1,1,0]] from d = 1011; T * (1,1,0) = (1, 0).
  const h::ToeplitzSeed s(3, 2, BitString::from_bits("1011"));
  EXPECT_EQ(h::toeplitz_hash(s, BitString::from_bits("110")).to_bits(), "10");
}

TEST(Toeplitz, FastPathMatchesNaiveProduct) {
  Rng rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t in = 1 + rng.next_u64() % 400;
    const std::size_t out = rng.next_u64() % (in + 1);
    const auto s = h::ToeplitzSeed::random(in, out, rng);
    const auto u = random_bits(in, rng);
    ASSERT_EQ(h::toeplitz_hash(s, u), naive_hash(s, u)) << in << "x" << out;
  }
}

TEST(Toeplitz, LinearOverGf2) {
  Rng rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t in = 1 + rng.next_u64() % 300;
    const auto s = h::ToeplitzSeed::random(in, rng.next_u64() % (in + 1), rng);
    const auto u = random_bits(in, rng);
    const auto v = random_bits(in, rng);
    ASSERT_EQ(h::toeplitz_hash(s, u ^ v), h::toeplitz_hash(s, u) ^ h::toeplitz_hash(s, v));
  }
}

TEST(Toeplitz, SeedValidation) {
  EXPECT_THROW(h::ToeplitzSeed(2, 3, BitString(4)), dicka::LengthMismatch);
  EXPECT_THROW(h::ToeplitzSeed(3, 2, BitString(3)), dicka::LengthMismatch);
  const h::ToeplitzSeed s(3, 2, BitString(4));
  EXPECT_THROW(h::toeplitz_hash(s, BitString(4)), dicka::LengthMismatch);
}

TEST(VerifyHash, MatchingPairAndEmptyTag) {
  Rng rng(8);
  const auto s = h::ToeplitzSeed::random(100, 20, rng);
  const auto u = random_bits(100, rng);
  EXPECT_TRUE(h::verify_hash(s, u, h::toeplitz_hash(s, u)));
  const auto empty = h::ToeplitzSeed::random(100, 0, rng);
  EXPECT_TRUE(h::verify_hash(empty, random_bits(100, rng), BitString()));
}

TEST(VerifyHash, SingleFlipNeverCollidesWith64BitTags) {
  Rng rng(9);
  const auto u = random_bits(256, rng);
  int collisions = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const auto s = h::ToeplitzSeed::random(256, 64, rng);
    auto v = u;
    v.flip(rng.next_u64() % 256);
    collisions += h::verify_hash(s, v, h::toeplitz_hash(s, u)) ? 1 : 0;
  }
  EXPECT_EQ(collisions, 0);
}

TEST(VerifyHash, CollisionRateForShortTagsIsTwoUniversal) {
  Rng rng(10);
  const int seeds = 20000;
  const std::size_t out = 4;
  int collisions = 0;
  for (int trial = 0; trial < seeds; ++trial) {
    const auto u = random_bits(64, rng);
    auto v = random_bits(64, rng);
    if (v == u) v.flip(0);
    const auto s = h::ToeplitzSeed::random(64, out, rng);
    collisions += h::toeplitz_hash(s, u) == h::toeplitz_hash(s, v) ? 1 : 0;
  }
  const double p = std::ldexp(1.0, -static_cast<int>(out));
  const double sigma = std::sqrt(p * (1 - p) / seeds);
  EXPECT_NEAR(static_cast<double>(collisions) / seeds, p, 5 * sigma);
}
