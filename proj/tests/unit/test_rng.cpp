#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "fairspec/rng.hpp"

using fairspec::RandomStream;

TEST(Rng, SameSeedSameSequence) {
  RandomStream a(123), b(123);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(Rng, UniformOpenNeverHitsEndpoints) {
  RandomStream r(5);
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform_open();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Rng, DerivedStreamsDifferByPath) {
  std::set<std::uint64_t> seeds;
  for (std::uint64_t i = 0; i < 50; ++i)
    for (std::uint64_t t = 0; t < 50; ++t) seeds.insert(fairspec::derive_seed(9, {i, t}));
  EXPECT_EQ(seeds.size(), 2500u);
  EXPECT_EQ(fairspec::derive_seed(9, {1, 2}), fairspec::derive_seed(9, {1, 2}));
  EXPECT_NE(fairspec::derive_seed(9, {1, 2}), fairspec::derive_seed(9, {2, 1}));
  EXPECT_NE(fairspec::derive_seed(9, {1}), fairspec::derive_seed(10, {1}));
}

TEST(Rng, BelowIsUniform) {
  RandomStream r(77);
  std::vector<int> counts(3, 0);
  const int n = 90000;
  for (int i = 0; i < n; ++i) {
    const auto v = r.below(3);
    ASSERT_LT(v, 3u);
    ++counts[v];
  }
  for (int c : counts) EXPECT_NEAR(c, n / 3.0, 3 * std::sqrt(n * (1.0 / 3) * (2.0 / 3)));
}
