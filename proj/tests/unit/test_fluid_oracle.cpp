#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "fairspec/error.hpp"
#include "fairspec/estimator.hpp"
#include "fairspec/fluid_oracle.hpp"

using namespace fairspec;

namespace {

RegionSpec random_region(RandomStream& rng) {
  RegionSpec r;
  const std::size_t n = 2 + rng.below(3);
  r.capacity = static_cast<std::uint32_t>(1 + rng.below(10));
  for (std::size_t i = 0; i < n; ++i) r.alphas.push_back(0.05 + 0.9 * rng.uniform_open());
  return r;
}

double binomial(unsigned n, unsigned k) {
  double v = 1;
  for (unsigned i = 1; i <= k; ++i) v = v * (n - k + i) / i;
  return v;
}

}  // namespace

TEST(Vertex, Examples) {
  const RegionSpec r{{0.5, 0.5}, 3};
  EXPECT_EQ(goodput_vertex({{0, 0}}, r).values, (std::vector<double>{1, 1}));
  EXPECT_EQ(goodput_vertex({{2, 1}}, r).values, (std::vector<double>{1.75, 1.5}));
}

TEST(Vertex, InfeasibleThrows) {
  const RegionSpec r{{0.5, 0.5}, 3};
  EXPECT_THROW(goodput_vertex({{2, 2}}, r), BudgetViolation);
  EXPECT_THROW(goodput_vertex({{1}}, r), BudgetViolation);
}

TEST(Vertex, WithinBounds) {
  const RegionSpec r{{0.2, 0.6, 0.9}, 6};
  const double hi = (1 - std::pow(0.9, 7)) / (1 - 0.9);
  for (const auto& d : enumerate_decisions(3, 6)) {
    for (double v : goodput_vertex(d, r).values) {
      EXPECT_GE(v, 1.0);
      EXPECT_LE(v, hi + 1e-12);
    }
  }
}

TEST(Enumerate, Counts) {
  const auto one = enumerate_decisions(1, 3);
  ASSERT_EQ(one.size(), 4u);
  for (std::uint32_t s = 0; s < 4; ++s) EXPECT_EQ(one[s].slots, std::vector<std::uint32_t>{s});
  EXPECT_EQ(enumerate_decisions(2, 2).size(), 6u);
  EXPECT_EQ(enumerate_decisions(3, 4).size(), 35u);
  for (unsigned n = 1; n <= 4; ++n)
    for (unsigned c = 0; c <= 6; ++c) EXPECT_EQ(enumerate_decisions(n, c).size(), binomial(c + n, n));
}

TEST(Enumerate, LexicographicAndGuarded) {
  const auto all = enumerate_decisions(3, 3);
  EXPECT_TRUE(std::is_sorted(all.begin(), all.end()));
  EXPECT_THROW(enumerate_decisions(7, 2), SizeGuardError);
  EXPECT_THROW(enumerate_decisions(2, 17), SizeGuardError);
}

TEST(FrankWolfe, SymmetricRegionGivesEqualCoordinates) {
  for (std::uint32_t c : {3u, 8u, 16u}) {
    const RegionSpec r{std::vector<double>(4, 0.7), c};
    EXPECT_LE(solve_optimal_goodput(r).point.fw_gap, 1e-6);
    // Coordinate spread is about 4x the gap when x* is not a vertex (C = 3).
    FrankWolfeOptions tight;
    tight.gap_tol = 1e-8;
    const auto res = solve_optimal_goodput(r, tight);
    for (double v : res.point.values) EXPECT_NEAR(v, res.point.values[0], 1e-6);
  }
}

TEST(FrankWolfe, TinyRegion) {
  const RegionSpec r{{0.5, 0.5}, 2};
  const auto res = solve_optimal_goodput(r);
  EXPECT_NEAR(res.point.values[0], 1.5, 1e-9);
  EXPECT_NEAR(res.point.values[1], 1.5, 1e-9);
  const auto grid = small_instance_optimum(r, 4);
  EXPECT_NEAR(grid.values[0], 1.5, 1e-6);
  EXPECT_NEAR(grid.values[1], 1.5, 1e-6);
}

TEST(FrankWolfe, GapBoundsSuboptimality) {
  RandomStream rng(8);
  for (int k = 0; k < 10; ++k) {
    const auto r = random_region(rng);
    const auto fw = solve_optimal_goodput(r);
    const auto grid = small_instance_optimum(r, 4);
    EXPECT_GE(fw.utility, utility_log(grid.values) - fw.point.fw_gap - 1e-9);
  }
}

TEST(FrankWolfe, LineSearchObjectiveIsMonotone) {
  RandomStream rng(9);
  for (int k = 0; k < 10; ++k) {
    const auto r = random_region(rng);
    std::vector<double> trace;
    FrankWolfeOptions opts;
    opts.objective_trace = &trace;
    solve_optimal_goodput(r, opts);
    for (std::size_t i = 1; i < trace.size(); ++i) EXPECT_GE(trace[i], trace[i - 1] - 1e-12);
  }
}

TEST(FrankWolfe, OpenLoopReachesNearOptimum) {
  const RegionSpec r{{0.3, 0.6, 0.85}, 8};
  FrankWolfeOptions opts;
  opts.step_rule = StepRule::kOpenLoop;
  opts.max_iters = 20000;
  const auto open = solve_optimal_goodput(r, opts);
  const auto exact = solve_optimal_goodput(r);
  EXPECT_NEAR(open.utility, exact.utility, 1e-3);
}

TEST(FrankWolfe, PointRespectsBounds) {
  RandomStream rng(10);
  for (int k = 0; k < 20; ++k) {
    const auto r = random_region(rng);
    const double amax = *std::max_element(r.alphas.begin(), r.alphas.end());
    const double hi = expected_goodput(amax, r.capacity);
    for (double v : solve_optimal_goodput(r).point.values) {
      EXPECT_GE(v, 1.0 - 1e-12);
      EXPECT_LE(v, hi + 1e-12);
    }
  }
}

TEST(SmallInstance, AgreesWithFrankWolfe) {
  RandomStream rng(11);
  for (int k = 0; k < 50; ++k) {
    const auto r = random_region(rng);
    const auto fw = solve_optimal_goodput(r);
    EXPECT_LE(fw.point.fw_gap, 1e-6);
    const auto grid = small_instance_optimum(r, 4);
    EXPECT_NEAR(utility_log(grid.values), fw.utility, 1e-4);
  }
}

TEST(SmallInstance, SingleDecisionRegion) {
  const RegionSpec r{{0.4, 0.8}, 0};
  EXPECT_EQ(small_instance_optimum(r, 2).values, (std::vector<double>{1, 1}));
  EXPECT_EQ(solve_optimal_goodput(r).point.values, (std::vector<double>{1, 1}));
}

TEST(SmallInstance, SymmetricRegion) {
  const auto g = small_instance_optimum({{0.6, 0.6, 0.6}, 5}, 4);
  for (double v : g.values) EXPECT_NEAR(v, g.values[0], 1e-6);
}

TEST(SmallInstance, GuardEnforced) {
  EXPECT_THROW(small_instance_optimum({std::vector<double>(7, 0.5), 3}, 1), SizeGuardError);
}

TEST(Simplex, Projection) {
  std::vector<double> v{0.5, 0.5};
  project_to_simplex(v);
  EXPECT_EQ(v, (std::vector<double>{0.5, 0.5}));
  v = {2.0, 0.0, -1.0};
  project_to_simplex(v);
  EXPECT_NEAR(v[0], 1.0, 1e-15);
  EXPECT_EQ(v[1], 0.0);
  EXPECT_EQ(v[2], 0.0);
  v = {0.3, 0.3, 0.3};
  project_to_simplex(v);
  for (double x : v) EXPECT_NEAR(x, 1.0 / 3, 1e-15);
}
