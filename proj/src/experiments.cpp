#include "fairspec/experiments.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>

#include "CLI11.hpp"
#include "fairspec/error.hpp"
#include "fairspec/kernels.hpp"
#include "fairspec/trace_io.hpp"

namespace fairspec {

namespace fs = std::filesystem;

namespace {

ordered_json nullable(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

template <typename T>
ordered_json list_or_null(const std::vector<T>& v, bool present) {
  return present ? ordered_json(v) : ordered_json(nullptr);
}

std::unique_ptr<TraceWriter> make_writer(std::ostream& out, const ExperimentConfig& config) {
  if (config.format == "jsonl") return std::make_unique<JsonlTraceWriter>(out, config);
  return std::make_unique<CsvTraceWriter>(out, config);
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path.string());
  return f;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory " + dir.string() + ": " + ec.message());
}

// Runs one configuration, streaming its trace to `trace_path`.
std::vector<RoundRecord> run_to_file(const ExperimentConfig& config, const fs::path& trace_path) {
  std::ofstream file = open_output(trace_path);
  auto writer = make_writer(file, config);
  auto trace = run_experiment(config, [&](const RoundRecord& r) { writer->write(r); });
  file.flush();
  if (!file) throw Error("failed writing " + trace_path.string());
  return trace;
}

template <typename Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace

ExperimentConfig resolve_config(const CliOptions& options) {
  ExperimentConfig c = load_config(options.config_path);
  if (options.out_dir) c.output_dir = *options.out_dir;
  if (options.seed) c.seed = *options.seed;
  if (options.format) c.format = *options.format;
  validate_config(c);
  return c;
}

RunSummary summarize(std::span<const RoundRecord> trace, std::size_t n) {
  RunSummary s;
  s.rounds = trace.size();
  s.zero_slot_rounds.assign(n, 0);
  if (trace.empty()) return s;
  s.x_bar = empirical_average(trace, trace.size()).values;
  s.expected_bar.assign(n, 0.0);
  s.mean_alpha_hat.assign(n, 0.0);
  for (const RoundRecord& r : trace) {
    kernels::axpy(1.0, r.expected, s.expected_bar);
    kernels::axpy(1.0, r.alpha_hat, s.mean_alpha_hat);
    for (std::size_t i = 0; i < n; ++i) s.zero_slot_rounds[i] += r.slots[i] == 0 ? 1 : 0;
    s.receive_ms += r.time.receive_ms;
    s.verify_ms += r.time.verify_ms;
    s.send_ms += r.time.send_ms;
    s.total_ms += r.time.total_ms;
  }
  const double inv = 1.0 / static_cast<double>(trace.size());
  kernels::scale(s.expected_bar, inv, s.expected_bar);
  kernels::scale(s.mean_alpha_hat, inv, s.mean_alpha_hat);
  s.utility_running_avg = trace.back().utility_running_avg;
  s.utility_smoothed = trace.back().utility_smoothed;
  return s;
}

ordered_json summary_json(const ExperimentConfig& config, const RunSummary& s) {
  const bool have = s.rounds > 0;
  ordered_json j;
  j["scenario"] = config.scenario;
  j["scheduler"] = scheduler_name(config.scheduler);
  j["seed"] = config.seed;
  j["clients"] = config.clients;
  j["capacity"] = config.capacity;
  j["rounds"] = s.rounds;
  j["utility_running_avg"] = nullable(s.utility_running_avg);
  j["utility_smoothed"] = nullable(s.utility_smoothed);
  j["x_bar"] = list_or_null(s.x_bar, have);
  j["mean_alpha_hat"] = list_or_null(s.mean_alpha_hat, have);
  j["zero_slot_rounds"] = s.zero_slot_rounds;
  if (have && s.total_ms > 0.0) {
    j["time_fractions"] = {{"receive", s.receive_ms / s.total_ms},
                           {"verify", s.verify_ms / s.total_ms},
                           {"send", s.send_ms / s.total_ms}};
  } else {
    j["time_fractions"] = nullptr;
  }
  j["total_time_ms"] = have ? ordered_json(s.total_ms) : ordered_json(nullptr);
  return j;
}

OracleReport compute_oracle(const ExperimentConfig& config) {
  OracleReport report;
  const AcceptanceProfile profile = build_profile(config.profile, config.clients);
  report.alphas = long_run_alphas(profile, config.rounds);
  const RegionSpec region{report.alphas, config.capacity};
  FrankWolfeOptions opts;
  opts.max_iters = config.oracle.max_iters;
  opts.gap_tol = config.oracle.gap_tol;
  report.fw = solve_optimal_goodput(region, opts);
  if (!config.oracle.cross_check) {
    report.cross_check = "disabled";
  } else if (within_enumeration_guard(config.clients, config.capacity)) {
    const GoodputPoint grid = small_instance_optimum(region, config.oracle.restarts);
    report.grid_utility = utility_log(grid.values);
    report.cross_check = std::abs(*report.grid_utility - report.fw.utility) <= 1e-4 ? "ok" : "mismatch";
  }
  return report;
}

ordered_json oracle_json(const ExperimentConfig& config, const OracleReport& r) {
  ordered_json j;
  j["scenario"] = config.scenario;
  j["capacity"] = config.capacity;
  j["alphas"] = r.alphas;
  j["x_star"] = r.fw.point.values;
  j["utility"] = r.fw.utility;
  j["fw_gap"] = r.fw.point.fw_gap;
  j["gap_tol"] = config.oracle.gap_tol;
  j["iterations"] = r.fw.iterations;
  j["converged"] = r.fw.converged;
  ordered_json cc;
  cc["status"] = r.cross_check;
  cc["utility_grid"] = nullable(r.grid_utility);
  cc["abs_diff"] = r.grid_utility ? ordered_json(std::abs(*r.grid_utility - r.fw.utility)) : ordered_json(nullptr);
  j["cross_check"] = cc;
  return j;
}

ComparisonReport compare_schedulers(const ExperimentConfig& config, std::span<const SchedulerKind> schedulers) {
  ComparisonReport report;
  report.oracle = compute_oracle(config);
  for (SchedulerKind kind : schedulers) {
    ExperimentConfig c = config;
    c.scheduler = kind;
    const auto trace = run_experiment(c);
    SchedulerComparison entry;
    entry.scheduler = kind;
    entry.summary = summarize(trace, c.clients);
    if (!trace.empty()) {
      entry.gap_to_oracle = report.oracle.fw.utility - utility_log(entry.summary.expected_bar);
      entry.realized_gap = report.oracle.fw.utility - *entry.summary.utility_running_avg;
    }
    report.entries.push_back(std::move(entry));
  }
  return report;
}

ordered_json comparison_json(const ExperimentConfig& config, const ComparisonReport& r) {
  ordered_json j;
  j["scenario"] = config.scenario;
  j["seed"] = config.seed;
  j["rounds"] = config.rounds;
  j["oracle"] = oracle_json(config, r.oracle);
  ordered_json rows = ordered_json::array();
  for (const auto& e : r.entries) {
    ExperimentConfig c = config;
    c.scheduler = e.scheduler;
    ordered_json row = summary_json(c, e.summary);
    row["utility_expected"] =
        e.summary.rounds ? ordered_json(utility_log(e.summary.expected_bar)) : ordered_json(nullptr);
    row["gap_to_oracle"] = e.summary.rounds ? ordered_json(e.gap_to_oracle) : ordered_json(nullptr);
    row["realized_gap"] = e.summary.rounds ? ordered_json(e.realized_gap) : ordered_json(nullptr);
    rows.push_back(row);
  }
  j["schedulers"] = rows;
  return j;
}

int cmd_run(const CliOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    const ExperimentConfig config = resolve_config(options);
    const fs::path dir(config.output_dir);
    ensure_dir(dir);
    const auto trace = run_to_file(config, dir / ("trace." + config.format));
    const ordered_json summary = summary_json(config, summarize(trace, config.clients));
    open_output(dir / "summary.json") << summary.dump(2) << '\n';
    out << summary.dump(2) << '\n';
    return kExitOk;
  });
}

int cmd_oracle(const CliOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    const ExperimentConfig config = resolve_config(options);
    const OracleReport report = compute_oracle(config);
    out << oracle_json(config, report).dump(2) << '\n';
    if (report.fw.point.fw_gap > config.oracle.gap_tol) {
      err << "oracle did not reach gap_tol " << config.oracle.gap_tol << " (fw_gap "
          << report.fw.point.fw_gap << ")\n";
      return kExitRuntime;
    }
    return kExitOk;
  });
}

int cmd_compare(const CliOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    const ExperimentConfig config = resolve_config(options);
    if (config.compare.size() < 2) {
      err << "usage: compare needs at least two schedulers in the config's \"compare\" list\n";
      return kExitUsage;
    }
    const fs::path dir(config.output_dir);
    ensure_dir(dir);
    for (SchedulerKind kind : config.compare) {
      ExperimentConfig c = config;
      c.scheduler = kind;
      run_to_file(c, dir / ("trace-" + std::string(scheduler_name(kind)) + "." + c.format));
    }
    const ComparisonReport report = compare_schedulers(config, config.compare);
    const ordered_json j = comparison_json(config, report);
    open_output(dir / "compare.json") << j.dump(2) << '\n';

    std::ofstream csv = open_output(dir / "compare.csv");
    csv << "# build: " << build_identifier() << '\n';
    csv << "# config: " << to_json(config).dump() << '\n';
    csv << "scheduler,U_running_avg,U_expected,U_oracle,gap_to_oracle,realized_gap,total_ms,"
           "receive_frac,verify_frac,send_frac";
    for (std::size_t i = 0; i < config.clients; ++i) csv << ",xbar_" << i;
    csv << '\n';
    for (const auto& e : report.entries) {
      const RunSummary& s = e.summary;
      if (s.rounds == 0) continue;
      csv << scheduler_name(e.scheduler) << ',' << format_double(*s.utility_running_avg) << ','
          << format_double(utility_log(s.expected_bar)) << ',' << format_double(report.oracle.fw.utility) << ','
          << format_double(e.gap_to_oracle) << ',' << format_double(e.realized_gap) << ','
          << format_double(s.total_ms) << ',' << format_double(s.receive_ms / s.total_ms) << ','
          << format_double(s.verify_ms / s.total_ms) << ',' << format_double(s.send_ms / s.total_ms);
      for (double v : s.x_bar) csv << ',' << format_double(v);
      csv << '\n';
    }
    out << j.dump(2) << '\n';
    return kExitOk;
  });
}

namespace {

ExperimentConfig with_swept_value(const ExperimentConfig& base, const std::string& param, double value) {
  ExperimentConfig c = base;
  const std::string key = "sweep.values";
  auto as_count = [&](double v) {
    if (!(v >= 1.0) || v != std::floor(v) || v > 1e6)
      throw ConfigError(key, param + " values must be positive integers");
    return static_cast<std::uint64_t>(v);
  };
  if (param == "beta") {
    c.smoothing.beta = StepSchedule::constant(value);
  } else if (param == "eta") {
    c.smoothing.eta = StepSchedule::constant(value);
  } else if (param == "capacity") {
    c.capacity = static_cast<std::uint32_t>(as_count(value));
  } else if (param == "clients") {
    c.clients = as_count(value);
    if (c.latency) c.latency.reset();  // per-client arrays no longer fit
  } else {
    throw ConfigError("sweep.parameter", "expected beta, eta, capacity or clients");
  }
  validate_config(c);
  return c;
}

}  // namespace

int cmd_sweep(const CliOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    const ExperimentConfig config = resolve_config(options);
    std::string param = options.sweep_parameter.value_or(config.sweep ? config.sweep->parameter : "");
    std::vector<double> values = options.sweep_values.value_or(config.sweep ? config.sweep->values : std::vector<double>{});
    if (param.empty()) {
      err << "usage: sweep needs --param (beta, eta, capacity or clients)\n";
      return kExitUsage;
    }
    if (values.empty()) {
      err << "usage: sweep needs a non-empty --values list\n";
      return kExitUsage;
    }
    std::vector<ExperimentConfig> variants;
    for (double v : values) variants.push_back(with_swept_value(config, param, v));

    const fs::path dir(config.output_dir);
    ensure_dir(dir);
    std::ofstream csv = open_output(dir / "sweep.csv");
    csv << "# build: " << build_identifier() << '\n';
    csv << "# config: " << to_json(config).dump() << '\n';
    csv << "parameter,value,t,client,S,m,x,alpha_hat,X,U_smoothed,U_running_avg\n";

    ordered_json results = ordered_json::array();
    for (std::size_t k = 0; k < variants.size(); ++k) {
      const ExperimentConfig& c = variants[k];
      const std::string value = format_double(values[k]);
      const auto trace = run_experiment(c, [&](const RoundRecord& r) {
        for (std::size_t i = 0; i < r.slots.size(); ++i) {
          csv << param << ',' << value << ',' << r.t << ',' << i << ',' << r.slots[i] << ',' << r.accepted[i]
              << ',' << format_double(r.realized[i]) << ',' << format_double(r.alpha_hat[i]) << ','
              << format_double(r.goodput_hat[i]) << ',' << format_double(r.utility_smoothed) << ','
              << format_double(r.utility_running_avg) << '\n';
        }
      });
      ordered_json entry;
      entry["value"] = values[k];
      entry["summary"] = summary_json(c, summarize(trace, c.clients));
      results.push_back(entry);
    }
    csv.flush();
    if (!csv) throw Error("failed writing sweep.csv");
    ordered_json j;
    j["parameter"] = param;
    j["results"] = results;
    out << j.dump(2) << '\n';
    return kExitOk;
  });
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fair-goodput speculative decoding simulator"};
  app.require_subcommand(1);
  CliOptions options;
  std::string format;
  std::uint64_t seed = 0;
  std::string param;
  std::vector<double> values;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", options.config_path, "experiment config (JSON)")->required();
    sub->add_option("--out", options.out_dir, "output directory (overrides output.dir)");
    sub->add_option("--seed", seed, "master seed (overrides the config)");
    sub->add_option("--format", format, "trace format")->check(CLI::IsMember({"csv", "jsonl"}));
  };
  CLI::App* run = app.add_subcommand("run", "simulate one scheduler and write its trace");
  CLI::App* oracle = app.add_subcommand("oracle", "compute the optimal goodput x*");
  CLI::App* compare = app.add_subcommand("compare", "run every scheduler in the config's compare list");
  CLI::App* sweep = app.add_subcommand("sweep", "rerun the config over a list of parameter values");
  for (CLI::App* sub : {run, oracle, compare, sweep}) add_common(sub);
  sweep->add_option("--param", param, "beta, eta, capacity or clients");
  sweep->add_option("--values", values, "comma-separated values")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << e.what() << '\n';
    return kExitUsage;
  }

  for (CLI::App* sub : {run, oracle, compare, sweep}) {
    if (sub->parsed()) {
      options.command = sub->get_name();
      if (sub->count("--seed")) options.seed = seed;
      if (sub->count("--format")) options.format = format;
    }
  }
  if (sweep->parsed()) {
    if (sweep->count("--param")) options.sweep_parameter = param;
    if (sweep->count("--values")) options.sweep_values = values;
  }

  if (options.command == "run") return cmd_run(options, out, err);
  if (options.command == "oracle") return cmd_oracle(options, out, err);
  if (options.command == "compare") return cmd_compare(options, out, err);
  return cmd_sweep(options, out, err);
}

}  // namespace fairspec
