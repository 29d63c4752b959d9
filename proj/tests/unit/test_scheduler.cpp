#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "fairspec/error.hpp"
#include "fairspec/estimator.hpp"
#include "fairspec/scheduler.hpp"

using namespace fairspec;

namespace {

using Slots = std::vector<std::uint32_t>;

SchedulerInput random_input(RandomStream& rng, std::size_t n, std::uint32_t c) {
  SchedulerInput in;
  in.capacity = c;
  for (std::size_t i = 0; i < n; ++i) {
    in.weights.push_back(0.05 + 2.0 * rng.uniform_open());
    in.alphas.push_back(0.02 + 0.96 * rng.uniform_open());
  }
  return in;
}

// Objective computed from the definition rather than the library helper.
double direct_objective(const SchedulerInput& in, const Slots& s) {
  double v = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    double g = 0.0;
    for (std::uint32_t j = 0; j <= s[i]; ++j) g += std::pow(in.alphas[i], j);
    v += in.weights[i] * g;
  }
  return v;
}

}  // namespace

TEST(UtilityLog, Examples) {
  EXPECT_DOUBLE_EQ(utility_log(std::vector<double>{1, 1, 1}), 0.0);
  EXPECT_NEAR(utility_log(std::vector<double>{std::exp(1.0), std::exp(1.0)}), 2.0, 1e-15);
  EXPECT_NEAR(utility_log(std::vector<double>{2, 0.5}), 0.0, 1e-15);
  EXPECT_THROW(utility_log(std::vector<double>{1, 0}), InvalidArgument);
}

TEST(GradientLog, Examples) {
  EXPECT_EQ(gradient_log(std::vector<double>{1, 1}), (std::vector<double>{1, 1}));
  EXPECT_EQ(gradient_log(std::vector<double>{2, 4}), (std::vector<double>{0.5, 0.25}));
  EXPECT_EQ(gradient_log(std::vector<double>{0.5}), (std::vector<double>{2}));
}

TEST(GoodSpeed, SingleClientTakesBudget) {
  const auto r = goodspeed_schedule({{1.0}, {0.4}, 5});
  EXPECT_EQ(r.decision.slots, Slots{5});
}

TEST(GoodSpeed, HighAlphaClientWins) {
  const SchedulerInput in{{1, 1}, {0.9, 0.1}, 3};
  const auto r = goodspeed_schedule(in);
  EXPECT_EQ(r.decision.slots, (Slots{3, 0}));
  // hand enumeration of the four budget-saturating splits
  double best = -1;
  Slots arg;
  for (std::uint32_t a = 0; a <= 3; ++a) {
    const Slots s{a, 3 - a};
    if (direct_objective(in, s) > best) {
      best = direct_objective(in, s);
      arg = s;
    }
  }
  EXPECT_EQ(arg, (Slots{3, 0}));
  EXPECT_NEAR(r.objective, best, 1e-12);
}

TEST(GoodSpeed, MatchesBruteForceOnRandomInstances) {
  RandomStream rng(2024);
  for (int k = 0; k < 100; ++k) {
    const std::size_t n = 1 + rng.below(4);
    const auto c = static_cast<std::uint32_t>(rng.below(13));
    const auto in = random_input(rng, n, c);
    const auto g = goodspeed_schedule(in);
    const auto b = brute_force_schedule(in);
    EXPECT_NEAR(g.objective, b.objective, 1e-12);
    EXPECT_NEAR(g.objective, direct_objective(in, g.decision.slots), 1e-12);
    EXPECT_EQ(g.decision.total(), c);
  }
}

TEST(GoodSpeed, ScaleInvariance) {
  RandomStream rng(5);
  for (int k = 0; k < 50; ++k) {
    auto in = random_input(rng, 5, 20);
    const auto a = goodspeed_schedule(in).decision;
    for (double& w : in.weights) w *= 8.0;  // power of two keeps comparisons exact
    EXPECT_EQ(goodspeed_schedule(in).decision, a);
  }
}

TEST(GoodSpeed, LargestWeightGetsMostSlotsWithEqualAlphas) {
  RandomStream rng(6);
  for (int k = 0; k < 50; ++k) {
    auto in = random_input(rng, 6, 30);
    std::fill(in.alphas.begin(), in.alphas.end(), in.alphas[0]);
    const auto d = goodspeed_schedule(in).decision;
    const auto top = std::max_element(in.weights.begin(), in.weights.end()) - in.weights.begin();
    for (auto s : d.slots) EXPECT_GE(d.slots[static_cast<std::size_t>(top)], s);
  }
}

TEST(GoodSpeed, StopsWhenGainUnderflows) {
  const auto r = goodspeed_schedule({{1e-300, 1e-300}, {1e-5, 1e-5}, 50});
  EXPECT_LT(r.decision.total(), 50u);
}

TEST(BruteForce, LexicographicTieBreak) {
  const SchedulerInput in{{1, 1}, {0.5, 0.5}, 1};
  const auto b = brute_force_schedule(in);
  const auto g = goodspeed_schedule(in);
  EXPECT_EQ(b.decision.slots, (Slots{0, 1}));
  EXPECT_EQ(g.decision.slots, (Slots{1, 0}));
  EXPECT_DOUBLE_EQ(b.objective, g.objective);
}

TEST(BruteForce, ZeroBudget) {
  EXPECT_EQ(brute_force_schedule({{1, 2, 3}, {0.3, 0.5, 0.7}, 0}).decision.slots, (Slots{0, 0, 0}));
}

TEST(BruteForce, SizeGuard) {
  EXPECT_THROW(brute_force_schedule({std::vector<double>(7, 1.0), std::vector<double>(7, 0.5), 4}),
               SizeGuardError);
  EXPECT_THROW(brute_force_schedule({{1, 1}, {0.5, 0.5}, 17}), SizeGuardError);
}

TEST(Fixed, Examples) {
  EXPECT_EQ(fixed_schedule(4, 24).slots, (Slots{6, 6, 6, 6}));
  EXPECT_EQ(fixed_schedule(8, 20).slots, (Slots{3, 3, 3, 3, 2, 2, 2, 2}));
  EXPECT_EQ(fixed_schedule(1, 7).slots, Slots{7});
  EXPECT_EQ(fixed_schedule(3, 0).slots, (Slots{0, 0, 0}));
}

TEST(Random, ZeroBudget) {
  RandomStream rng(1);
  EXPECT_EQ(random_schedule(4, 0, rng).slots, (Slots{0, 0, 0, 0}));
}

TEST(Random, UniformOverCompositions) {
  RandomStream rng(99);
  std::map<Slots, int> counts;
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++counts[random_schedule(2, 2, rng).slots];
  ASSERT_EQ(counts.size(), 3u);
  const double sigma = std::sqrt(n * (1.0 / 3) * (2.0 / 3));
  for (const auto& [slots, c] : counts) EXPECT_NEAR(c, n / 3.0, 3 * sigma);
}

TEST(Random, SumsToBudgetAndIsSeeded) {
  RandomStream a(3), b(3);
  for (int i = 0; i < 1000; ++i) {
    const auto d = random_schedule(5, 17, a);
    EXPECT_EQ(d.total(), 17u);
    EXPECT_EQ(d, random_schedule(5, 17, b));
  }
}
