#pragma once

// Round-based simulation of distributed speculative decoding with a central
// verifier: drafting, verification, estimator updates, next-round allocation,
// and modeled time accounting.

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "fairspec/acceptance_profile.hpp"
#include "fairspec/estimator.hpp"
#include "fairspec/experiment_config.hpp"
#include "fairspec/fluid_oracle.hpp"
#include "fairspec/scheduler.hpp"

namespace fairspec {

struct ClientState {
  ClientEstimates estimates;
  std::uint32_t current_slots = 0;
  TokenId prefix_last_token = 0;
  std::uint64_t zero_slot_rounds = 0;
};

struct TimeBreakdown {
  double receive_ms = 0.0;
  double verify_ms = 0.0;
  double send_ms = 0.0;
  double total_ms = 0.0;  // receive + verify + send, summed in that order
};

struct RoundRecord {
  std::uint64_t t = 0;
  std::vector<std::uint32_t> slots;       // S_i(t)
  std::vector<double> true_alpha;         // alpha_i(t) (long-run value in token-model mode)
  std::vector<std::uint32_t> accepted;    // m_i
  std::vector<double> realized;           // x_i(t) = m_i + 1
  std::vector<double> alpha_hat;          // after this round's update
  std::vector<double> goodput_hat;        // X_i(t)
  std::vector<std::uint32_t> next_slots;  // S_i(t+1)
  std::vector<double> expected;           // expected_goodput(alpha_i(t), S_i(t))
  double utility_smoothed = 0.0;          // U(X(t))
  double utility_running_avg = 0.0;       // U(xbar(t))
  TimeBreakdown time;
};

struct SimParams {
  std::uint32_t capacity = 1;
  SchedulerKind scheduler = SchedulerKind::kGoodSpeed;
  SmoothingParams smoothing;
  LatencyParams latency;
  std::uint64_t seed = 1;
};

/// Cumulative per-client goodput, for U(xbar(t)).
struct RunningGoodput {
  std::vector<double> sum;
  std::uint64_t rounds = 0;

  std::vector<double> mean() const;
};

/// Initial state: alpha_hat 0.5, X 1, Fixed-S split of the capacity.
std::vector<ClientState> initial_state(std::size_t num_clients, std::uint32_t capacity);

/// One round at index t >= 1. Updates `state` and `running` in place.
/// Throws BudgetViolation if the current slots exceed the capacity.
RoundRecord run_round(std::vector<ClientState>& state, AcceptanceProcess& process,
                      const SimParams& params, std::uint64_t t, RunningGoodput& running);

/// Owns the profile, state and running sums of one simulation.
class Simulation {
 public:
  Simulation(AcceptanceProfile profile, SimParams params);

  RoundRecord step();

  std::uint64_t rounds_done() const noexcept { return running_.rounds; }
  const std::vector<ClientState>& clients() const noexcept { return state_; }
  std::vector<double> running_average() const { return running_.mean(); }
  const SimParams& params() const noexcept { return params_; }

 private:
  std::unique_ptr<AcceptanceProfile> profile_;
  SimParams params_;
  AcceptanceProcess process_;
  std::vector<ClientState> state_;
  RunningGoodput running_;
};

SimParams sim_params_from(const ExperimentConfig& config);

using TraceSink = std::function<void(const RoundRecord&)>;

/// Runs config.rounds rounds, handing each record to `sink` as it completes,
/// and returns the full trace. Validates the config before round 1.
std::vector<RoundRecord> run_experiment(const ExperimentConfig& config, const TraceSink& sink = {});

/// Per-client mean of x_i(t) over the first T records. Throws InvalidArgument
/// unless 1 <= T <= trace.size().
GoodputPoint empirical_average(std::span<const RoundRecord> trace, std::uint64_t T);

/// Trailing-window mean and sample standard deviation per index; the first
/// window-1 entries use the points available.
std::pair<std::vector<double>, std::vector<double>> ma_smooth(std::span<const double> series,
                                                              std::size_t window);

}  // namespace fairspec
