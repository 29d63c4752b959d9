#pragma once

// Command-line front end: run / oracle / compare / sweep.
// Exit codes: 0 success, 1 runtime failure, 2 usage or config error.

#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "fairspec/config.hpp"
#include "fairspec/fluid_oracle.hpp"
#include "fairspec/sim_engine.hpp"

namespace fairspec {

enum ExitCode : int { kExitOk = 0, kExitRuntime = 1, kExitUsage = 2 };

struct CliOptions {
  std::string command;
  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> format;
  std::optional<std::string> sweep_parameter;
  std::optional<std::vector<double>> sweep_values;
};

/// Load the config and apply command-line overrides; re-validates.
ExperimentConfig resolve_config(const CliOptions& options);

struct RunSummary {
  std::uint64_t rounds = 0;
  std::optional<double> utility_running_avg;  // U(xbar(T))
  std::optional<double> utility_smoothed;     // U(X(T))
  std::vector<double> x_bar;
  std::vector<double> expected_bar;  // mean of expected_goodput(alpha_i(t), S_i(t))
  std::vector<double> mean_alpha_hat;
  std::vector<std::uint64_t> zero_slot_rounds;
  double receive_ms = 0.0;
  double verify_ms = 0.0;
  double send_ms = 0.0;
  double total_ms = 0.0;
};

RunSummary summarize(std::span<const RoundRecord> trace, std::size_t num_clients);
ordered_json summary_json(const ExperimentConfig& config, const RunSummary& summary);

struct OracleReport {
  std::vector<double> alphas;
  FrankWolfeResult fw;
  std::string cross_check = "skipped";  // ok | mismatch | skipped | disabled
  std::optional<double> grid_utility;
};

OracleReport compute_oracle(const ExperimentConfig& config);
ordered_json oracle_json(const ExperimentConfig& config, const OracleReport& report);

struct SchedulerComparison {
  SchedulerKind scheduler = SchedulerKind::kGoodSpeed;
  RunSummary summary;
  /// U(x*) - U(expected_bar): the averaged expected-goodput point lies in the
  /// region, so this is >= -fw_gap for stationary profiles.
  double gap_to_oracle = 0.0;
  /// U(x*) - U(xbar(T)) with realized goodput; may dip below 0 from sampling noise.
  double realized_gap = 0.0;
};

struct ComparisonReport {
  OracleReport oracle;
  std::vector<SchedulerComparison> entries;
};

ComparisonReport compare_schedulers(const ExperimentConfig& config,
                                    std::span<const SchedulerKind> schedulers);
ordered_json comparison_json(const ExperimentConfig& config, const ComparisonReport& report);

int cmd_run(const CliOptions& options, std::ostream& out, std::ostream& err);
int cmd_oracle(const CliOptions& options, std::ostream& out, std::ostream& err);
int cmd_compare(const CliOptions& options, std::ostream& out, std::ostream& err);
int cmd_sweep(const CliOptions& options, std::ostream& out, std::ostream& err);

/// Parses argv with CLI11 and dispatches to the subcommand.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fairspec
