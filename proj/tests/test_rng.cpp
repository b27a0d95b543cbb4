#include <gtest/gtest.h>

#include <set>

#include "onn/rng.hpp"

using namespace onn;

TEST(SplitMix64, ReferenceOutputs) {
  SplitMix64 g(0);
  EXPECT_EQ(g.next(), 0xe220a8397b1dcdafull);
  EXPECT_EQ(g.next(), 0x6e789e6aa1b965f4ull);
  EXPECT_EQ(g.next(), 0x06c45d188009454full);
}

TEST(SplitMix64, BelowStaysInRange) {
  SplitMix64 g(42);
  std::set<std::uint64_t> seen;
  for (int k = 0; k < 10000; ++k) {
    const auto v = g.below(7);
    ASSERT_LT(v, 7u);
    seen.insert(v);
  }
  EXPECT_EQ(seen.size(), 7u);
  EXPECT_EQ(SplitMix64(5).below(1), 0u);
}

TEST(SplitMix64, BelowIsHighProduct) {
  SplitMix64 a(99), b(99);
  const auto raw = a.next();
  EXPECT_EQ(b.below(1000), static_cast<std::uint64_t>((static_cast<unsigned __int128>(raw) * 1000) >> 64));
}

TEST(DeriveSeed, DistinctCoordinatesGiveDistinctSeeds) {
  std::set<std::uint64_t> seeds;
  for (std::uint64_t p = 0; p < 5; ++p)
    for (std::uint64_t l = 0; l < 3; ++l)
      for (std::uint64_t t = 0; t < 100; ++t) seeds.insert(derive_seed(1, p, l, t));
  EXPECT_EQ(seeds.size(), 1500u);
  EXPECT_EQ(derive_seed(1, 2, 3, 4), derive_seed(1, 2, 3, 4));
  EXPECT_NE(derive_seed(1, 2, 3, 4), derive_seed(2, 2, 3, 4));
}
