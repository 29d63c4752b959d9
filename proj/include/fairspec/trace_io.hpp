#pragma once

// Trace serialization. Both formats start with a header that carries the build
// identifier, the fully resolved config and the column list; only the build
// line may differ between reruns of the same config and seed.
//
// CSV: '#'-prefixed header lines, then one row per round with columns
//   t, S_0..S_{N-1}, m_0.., x_0.., X_0.., alpha_hat_0.., U_smoothed,
//   U_running_avg, receive_ms, verify_ms, send_ms, total_ms, scheduler, seed
// JSONL: one header object {"build", "config", "columns"}, then one object per
// round with the same fields (per-client fields as arrays).
// Floats are written with 9 significant digits.

#include <ostream>
#include <string>
#include <vector>

#include "fairspec/config.hpp"
#include "fairspec/sim_engine.hpp"

namespace fairspec {

std::string build_identifier();

/// printf("%.9g").
std::string format_double(double v);

std::vector<std::string> trace_columns(std::size_t num_clients);

class TraceWriter {
 public:
  virtual ~TraceWriter() = default;
  virtual void write(const RoundRecord& rec) = 0;
};

class CsvTraceWriter : public TraceWriter {
 public:
  CsvTraceWriter(std::ostream& out, const ExperimentConfig& config);
  void write(const RoundRecord& rec) override;

 private:
  std::ostream& out_;
  std::string scheduler_;
  std::uint64_t seed_;
};

class JsonlTraceWriter : public TraceWriter {
 public:
  JsonlTraceWriter(std::ostream& out, const ExperimentConfig& config);
  void write(const RoundRecord& rec) override;

 private:
  std::ostream& out_;
  std::string scheduler_;
  std::uint64_t seed_;
};

/// Strips '# build:' lines (CSV) or the "build" member of the JSONL header so
/// two trace files can be compared byte-for-byte.
std::string trace_body(const std::string& contents);

}  // namespace fairspec
