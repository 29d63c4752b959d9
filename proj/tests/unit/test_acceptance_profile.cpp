#include <gtest/gtest.h>

#include <cmath>

#include "fairspec/acceptance_profile.hpp"
#include "fairspec/error.hpp"

using namespace fairspec;

TEST(Profile, StationaryIsConstant) {
  const auto p = AcceptanceProfile::stationary({0.7});
  AcceptanceProcess proc(p, 1);
  for (std::uint64_t t : {0u, 1u, 500u, 99999u}) EXPECT_EQ(proc.alpha_at(0, t), 0.7);
}

TEST(Profile, PiecewiseSwitchIsInclusive) {
  const auto p = AcceptanceProfile::piecewise({{{0, 0.3}, {500, 0.8}}});
  AcceptanceProcess proc(p, 1);
  EXPECT_EQ(proc.alpha_at(0, 0), 0.3);
  EXPECT_EQ(proc.alpha_at(0, 499), 0.3);
  EXPECT_EQ(proc.alpha_at(0, 500), 0.8);
  EXPECT_EQ(proc.alpha_at(0, 5000), 0.8);
}

TEST(Profile, PiecewiseValidation) {
  EXPECT_THROW(AcceptanceProfile::piecewise({{{1, 0.3}}}).validate(), InvalidArgument);
  EXPECT_THROW(AcceptanceProfile::piecewise({{{0, 0.3}, {0, 0.5}}}).validate(), InvalidArgument);
}

TEST(Profile, RandomWalkErgodicAverage) {
  const RandomWalkSpec w{0.5, 0.1, 0.05, 0.95};
  const auto p = AcceptanceProfile::random_walk({w});
  AcceptanceProcess proc(p, 31);
  double sum = 0.0;
  const std::uint64_t steps = 100000;
  for (std::uint64_t t = 0; t < steps; ++t) {
    const double a = proc.alpha_at(0, t);
    ASSERT_GE(a, w.low - 1e-12);
    ASSERT_LE(a, w.high + 1e-12);
    sum += a;
  }
  EXPECT_NEAR(sum / steps, 0.5 * (w.low + w.high), 0.02);
}

TEST(Profile, RandomWalkIsSeededAndQueryOrderFree) {
  const auto p = AcceptanceProfile::random_walk({RandomWalkSpec{}, RandomWalkSpec{}});
  AcceptanceProcess a(p, 5), b(p, 5);
  const double late = b.alpha_at(1, 300);
  for (std::uint64_t t = 0; t <= 300; ++t) a.alpha_at(0, t);
  EXPECT_EQ(a.alpha_at(1, 300), late);
}

TEST(Profile, ConstantRatioPairHasExactRate) {
  for (double alpha : {0.05, 0.3, 0.9}) {
    const auto pair = constant_ratio_pair(6, alpha);
    for (TokenId c = 0; c < 6; ++c) EXPECT_NEAR(context_alpha(pair, c), alpha, 1e-15);
    EXPECT_NEAR(stationary_alpha(pair), alpha, 1e-12);
  }
}

TEST(Profile, StationaryAlphaMatchesEmpiricalAcceptance) {
  RandomStream model_rng(3);
  const auto pair = synthetic_pair(5, 0.6, 0.8, model_rng);
  const double want = stationary_alpha(pair);
  // walk the target chain and average the per-context acceptance rate
  RandomStream rng(4);
  TokenId s = 0;
  double total = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    total += context_alpha(pair, s);
    s = sample(pair.target.next(s), rng);
  }
  EXPECT_NEAR(total / n, want, 5e-3);
}

TEST(Profile, LongRunAlphas) {
  EXPECT_EQ(long_run_alphas(AcceptanceProfile::stationary({0.2, 0.9}), 10), (std::vector<double>{0.2, 0.9}));
  const auto pw = AcceptanceProfile::piecewise({{{0, 0.3}, {50, 0.8}}});
  // rounds 1..49 at 0.3, rounds 50..100 at 0.8
  EXPECT_NEAR(long_run_alphas(pw, 100)[0], (49 * 0.3 + 51 * 0.8) / 100, 1e-15);
  const auto rw = AcceptanceProfile::random_walk({RandomWalkSpec{0.5, 0.05, 0.2, 0.6}});
  EXPECT_NEAR(long_run_alphas(rw, 100)[0], 0.4, 1e-15);
}
