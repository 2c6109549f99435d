#include <gtest/gtest.h>

#include <set>

#include "dicka/rng.hpp"

using dicka::Rng;
using dicka::Stream;

TEST(Rng, SameSeedSameSequence) {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.next_u64(), b.next_u64());
}

TEST(Rng, SplitIsIndependentOfConsumption) {
  Rng a(7);
  const Rng fresh(7);
  for (int i = 0; i < 50; ++i) a.next_u64();
  Rng c1 = a.split(Stream::rounds, 3);
  Rng c2 = fresh.split(Stream::rounds, 3);
  EXPECT_EQ(c1.next_u64(), c2.next_u64());
}

TEST(Rng, SplitStreamsDiffer) {
  const Rng root(1);
  std::set<std::uint64_t> firsts;
  for (std::uint64_t i = 0; i < 1000; ++i) firsts.insert(root.split(Stream::rounds, i).next_u64());
  firsts.insert(root.split(Stream::error_correction).next_u64());
  firsts.insert(root.split(Stream::privacy_amplification).next_u64());
  EXPECT_EQ(firsts.size(), 1002U);
}

TEST(Rng, UniformRangeAndMean) {
  Rng r(3);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  // mean 1/2, sd of mean sqrt(1/12/n)
  EXPECT_NEAR(sum / n, 0.5, 5.0 * std::sqrt(1.0 / 12.0 / n));
}
