#include <gtest/gtest.h>

#include <cmath>

#include "fairspec/error.hpp"
#include "fairspec/fluid_oracle.hpp"
#include "fairspec/kernels.hpp"
#include "fairspec/sim_engine.hpp"

using namespace fairspec;

namespace {

SimParams params(std::size_t n, std::uint32_t c, SchedulerKind kind, std::uint64_t seed = 1) {
  SimParams p;
  p.capacity = c;
  p.scheduler = kind;
  p.latency = LatencyParams::uniform(n);
  p.seed = seed;
  return p;
}

ExperimentConfig stationary_config(std::vector<double> levels, std::uint32_t c, std::uint64_t rounds) {
  ExperimentConfig cfg;
  cfg.clients = levels.size();
  cfg.capacity = c;
  cfg.rounds = rounds;
  cfg.profile.levels = std::move(levels);
  return cfg;
}

}  // namespace

TEST(SimEngine, ZeroAcceptanceGivesFixedLikeSplit) {
  Simulation sim(AcceptanceProfile::stationary({0.0, 0.0, 0.0}), params(3, 7, SchedulerKind::kGoodSpeed));
  RoundRecord rec;
  for (int t = 0; t < 200; ++t) {
    rec = sim.step();
    for (double x : rec.realized) ASSERT_EQ(x, 1.0);
  }
  for (double x : rec.goodput_hat) EXPECT_NEAR(x, 1.0, 1e-9);
  std::vector<std::uint32_t> sorted = rec.next_slots;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(sorted, (std::vector<std::uint32_t>{2, 2, 3}));
}

TEST(SimEngine, FairnessKeepsLowAlphaClientServed) {
  Simulation sim(AcceptanceProfile::stationary({0.9, 0.1}), params(2, 6, SchedulerKind::kGoodSpeed, 3));
  double s0 = 0, s1 = 0;
  for (int t = 1; t <= 3000; ++t) {
    const auto rec = sim.step();
    if (t > 500) {
      s0 += rec.slots[0];
      s1 += rec.slots[1];
      EXPECT_GE(rec.goodput_hat[1], 1.0);
    }
  }
  EXPECT_GT(s0, s1);
  const auto xstar = solve_optimal_goodput({{0.9, 0.1}, 6}).point.values;
  const auto xbar = sim.running_average();
  EXPECT_NEAR(utility_log(xbar), utility_log(xstar), 0.02 * std::abs(utility_log(xstar)));
}

TEST(SimEngine, FixedSchedulerIsConstant) {
  Simulation sim(AcceptanceProfile::stationary({0.3, 0.5, 0.7, 0.9}), params(4, 24, SchedulerKind::kFixed));
  for (int t = 0; t < 100; ++t)
    EXPECT_EQ(sim.step().slots, (std::vector<std::uint32_t>{6, 6, 6, 6}));
}

TEST(SimEngine, RoundInvariants) {
  for (auto kind : {SchedulerKind::kGoodSpeed, SchedulerKind::kFixed, SchedulerKind::kRandom}) {
    Simulation sim(AcceptanceProfile::stationary({0.2, 0.5, 0.8}), params(3, 10, kind, 4));
    for (int t = 0; t < 500; ++t) {
      const auto rec = sim.step();
      std::uint64_t used = 0;
      for (std::size_t i = 0; i < 3; ++i) {
        used += rec.slots[i];
        EXPECT_GE(rec.realized[i], 1.0);
        EXPECT_LE(rec.realized[i], rec.slots[i] + 1.0);
        EXPECT_EQ(rec.realized[i], rec.accepted[i] + 1.0);
      }
      EXPECT_LE(used, 10u);
      if (kind == SchedulerKind::kGoodSpeed) EXPECT_EQ(used, 10u);
      EXPECT_EQ(rec.time.total_ms, rec.time.receive_ms + rec.time.verify_ms + rec.time.send_ms);
    }
  }
}

TEST(SimEngine, TimeModel) {
  SimParams p = params(2, 6, SchedulerKind::kFixed);
  p.latency.draft_ms_per_token = {8.0, 2.0};
  p.latency.uplink_ms = {5.0, 30.0};
  p.latency.uplink_ms_per_token = {0.5, 0.0};
  Simulation sim(AcceptanceProfile::stationary({0.5, 0.5}), p);
  const auto rec = sim.step();
  EXPECT_EQ(rec.time.receive_ms, std::max(5.0 + 8.5 * 3, 30.0 + 2.0 * 3));
  EXPECT_EQ(rec.time.verify_ms, 20.0 + 6.0);
  EXPECT_EQ(rec.time.send_ms, 0.05);
}

TEST(SimEngine, EstimatorTracksStationaryAlpha) {
  Simulation sim(AcceptanceProfile::stationary({0.35, 0.75}), params(2, 8, SchedulerKind::kFixed));
  RoundRecord rec;
  for (int t = 0; t < 300; ++t) rec = sim.step();
  EXPECT_NEAR(rec.alpha_hat[0], 0.35, 1e-9);
  EXPECT_NEAR(rec.alpha_hat[1], 0.75, 1e-9);
}

TEST(SimEngine, EstimatorReconvergesAfterSwitch) {
  auto prof = AcceptanceProfile::piecewise({{{0, 0.3}, {100, 0.8}}});
  Simulation sim(prof, params(1, 4, SchedulerKind::kFixed));
  RoundRecord rec;
  for (int t = 1; t <= 99; ++t) rec = sim.step();
  const double before = rec.alpha_hat[0];
  for (int t = 100; t <= 160; ++t) {
    rec = sim.step();
    const double k = static_cast<double>(t - 99);
    EXPECT_NEAR(rec.alpha_hat[0], 0.8 + std::pow(0.9, k) * (before - 0.8), 1e-12);
  }
}

TEST(SimEngine, ZeroSlotRoundsSkipAcceptanceUpdate) {
  SimParams p = params(3, 2, SchedulerKind::kFixed);
  Simulation sim(AcceptanceProfile::stationary({0.5, 0.5, 0.5}), p);
  for (int t = 0; t < 10; ++t) sim.step();
  EXPECT_EQ(sim.clients()[2].zero_slot_rounds, 10u);
  EXPECT_EQ(sim.clients()[2].estimates.alpha_hat, 0.5);
}

TEST(SimEngine, TokenModelModeRuns) {
  std::vector<ModelPair> models{constant_ratio_pair(4, 0.6), constant_ratio_pair(4, 0.3)};
  Simulation sim(AcceptanceProfile::token_model(models), params(2, 6, SchedulerKind::kGoodSpeed));
  for (int t = 0; t < 200; ++t) {
    const auto rec = sim.step();
    for (std::size_t i = 0; i < 2; ++i) EXPECT_LE(rec.realized[i], rec.slots[i] + 1.0);
  }
}

TEST(RunExperiment, ZeroRoundsIsEmpty) {
  EXPECT_TRUE(run_experiment(stationary_config({0.5, 0.6}, 4, 0)).empty());
}

TEST(RunExperiment, DeterministicTraces) {
  auto cfg = stationary_config({0.3, 0.6, 0.9}, 9, 300);
  cfg.scheduler = SchedulerKind::kRandom;
  const auto a = run_experiment(cfg);
  const auto b = run_experiment(cfg);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t t = 0; t < a.size(); ++t) {
    EXPECT_EQ(a[t].slots, b[t].slots);
    EXPECT_EQ(a[t].realized, b[t].realized);
    EXPECT_EQ(a[t].goodput_hat, b[t].goodput_hat);
  }
  cfg.seed = 2;
  const auto c = run_experiment(cfg);
  bool differs = false;
  for (std::size_t t = 0; t < a.size(); ++t) differs |= a[t].realized != c[t].realized;
  EXPECT_TRUE(differs);
}

TEST(RunExperiment, ConvergesNearOracle) {
  ExperimentConfig cfg;
  cfg.clients = 8;
  cfg.capacity = 16;
  cfg.rounds = 2000;
  cfg.profile.spread = std::array<double, 2>{0.3, 0.9};
  const auto trace = run_experiment(cfg);
  const auto alphas = resolve_levels(cfg.profile, 8);
  const double u_star = solve_optimal_goodput({alphas, 16}).utility;
  EXPECT_NEAR(trace.back().utility_running_avg, u_star, 0.02 * std::abs(u_star));
}

TEST(EmpiricalAverage, Examples) {
  std::vector<RoundRecord> trace(3);
  trace[0].realized = {2.0};
  trace[1].realized = {4.0};
  trace[2].realized = {9.0};
  EXPECT_EQ(empirical_average(trace, 2).values, std::vector<double>{3.0});
  EXPECT_THROW(empirical_average(trace, 0), InvalidArgument);
  EXPECT_THROW(empirical_average(trace, 4), InvalidArgument);
  for (auto& r : trace) r.realized = {1.5};
  EXPECT_EQ(empirical_average(trace, 3).values, std::vector<double>{1.5});
}

TEST(EmpiricalAverage, MatchesRunningValue) {
  auto cfg = stationary_config({0.4, 0.8}, 5, 500);
  const auto trace = run_experiment(cfg);
  for (std::uint64_t t : {1u, 17u, 250u, 500u}) {
    const double u = utility_log(empirical_average(trace, t).values);
    EXPECT_NEAR(u, trace[t - 1].utility_running_avg, 1e-9);
  }
}

TEST(MaSmooth, Examples) {
  const std::vector<double> s{1, 2, 3, 4};
  auto [m1, sd1] = ma_smooth(s, 1);
  EXPECT_EQ(m1, s);
  EXPECT_EQ(sd1, (std::vector<double>(4, 0.0)));
  auto [m2, sd2] = ma_smooth(s, 2);
  EXPECT_EQ(m2, (std::vector<double>{1, 1.5, 2.5, 3.5}));
  EXPECT_NEAR(sd2[3], std::sqrt(0.5), 1e-15);
  const std::vector<double> flat(6, 2.5);
  auto [m3, sd3] = ma_smooth(flat, 3);
  EXPECT_EQ(m3, flat);
  EXPECT_EQ(sd3, (std::vector<double>(6, 0.0)));
}

TEST(RunExperiment, TracesMatchAcrossKernelIsas) {
  if (kernels::avx2_table() == nullptr) GTEST_SKIP() << "AVX2 not available on this host";
  ExperimentConfig cfg;
  cfg.clients = 8;
  cfg.capacity = 16;
  cfg.rounds = 500;
  cfg.profile.spread = std::array<double, 2>{0.3, 0.9};
  const kernels::Isa prev = kernels::active_isa();
  kernels::set_active_isa(kernels::Isa::kScalar);
  const auto a = run_experiment(cfg);
  kernels::set_active_isa(kernels::Isa::kAvx2);
  const auto b = run_experiment(cfg);
  kernels::set_active_isa(prev);
  for (std::size_t t = 0; t < a.size(); ++t) {
    EXPECT_EQ(a[t].goodput_hat, b[t].goodput_hat);
    EXPECT_EQ(a[t].utility_running_avg, b[t].utility_running_avg);
  }
}
