#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fairspec/acceptance_profile.hpp"
#include "fairspec/estimator.hpp"

namespace fairspec {

enum class SchedulerKind { kGoodSpeed, kFixed, kRandom };

std::string_view scheduler_name(SchedulerKind kind) noexcept;
std::optional<SchedulerKind> parse_scheduler(std::string_view name) noexcept;

/// Modeled wall-time costs, in milliseconds. Per-client vectors have length N.
struct LatencyParams {
  std::vector<double> draft_ms_per_token;   // d_i
  std::vector<double> uplink_ms;            // u_i
  std::vector<double> uplink_ms_per_token;  // per-token uplink term
  double verify_fixed_ms = 20.0;            // v0
  double verify_ms_per_token = 1.0;         // v1
  double send_ms = 0.05;                    // s0

  static LatencyParams uniform(std::size_t num_clients, double draft_ms_per_token = 8.0,
                               double uplink_ms = 5.0, double uplink_ms_per_token = 0.0);
  void validate(std::size_t num_clients) const;
};

/// Config-level description of an acceptance profile; expanded into an
/// AcceptanceProfile for a given client count by build_profile().
struct ProfileSpec {
  AcceptanceProfile::Kind kind = AcceptanceProfile::Kind::kStationary;
  // Stationary levels, walk start points, or token-model agreements
  // (constant-ratio alphas when constant_ratio is set).
  std::vector<double> levels;
  // Evenly spaced levels over [lo, hi]; used when `levels` is empty.
  std::optional<std::array<double, 2>> spread;
  std::vector<std::vector<PiecewiseSegment>> segments;
  double walk_step = 0.05;
  double walk_low = kProfileAlphaLow;
  double walk_high = kProfileAlphaHigh;
  std::size_t vocab_size = 8;
  double concentration = 0.5;
  std::uint64_t model_seed = 7;
  bool constant_ratio = false;
};

std::vector<double> resolve_levels(const ProfileSpec& spec, std::size_t num_clients);
AcceptanceProfile build_profile(const ProfileSpec& spec, std::size_t num_clients);

struct OracleSettings {
  std::uint64_t max_iters = 100000;
  double gap_tol = 1e-6;
  bool cross_check = true;
  std::uint32_t restarts = 4;
};

struct SweepSettings {
  std::string parameter;  // beta | eta | capacity | clients
  std::vector<double> values;
};

struct ExperimentConfig {
  std::string scenario = "custom";
  std::size_t clients = 1;
  std::uint32_t capacity = 1;
  std::uint64_t rounds = 0;
  SchedulerKind scheduler = SchedulerKind::kGoodSpeed;
  std::vector<SchedulerKind> compare;
  std::string utility = "log";
  SmoothingParams smoothing;
  ProfileSpec profile;
  std::optional<LatencyParams> latency;  // defaults resolved per client count
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  std::string format = "csv";  // csv | jsonl
  OracleSettings oracle;
  std::optional<SweepSettings> sweep;

  LatencyParams resolved_latency() const;
};

/// Semantic validation (ranges, list lengths, profile ranges). Throws
/// ConfigError naming the offending key.
void validate_config(const ExperimentConfig& config);

}  // namespace fairspec
