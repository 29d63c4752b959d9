#include "fairspec/trace_io.hpp"

#include <cstdio>
#include <sstream>

#include "fairspec/kernels.hpp"

#ifndef FAIRSPEC_VERSION
#define FAIRSPEC_VERSION "dev"
#endif

namespace fairspec {

std::string build_identifier() {
  std::string id = "fairspec " FAIRSPEC_VERSION;
#if defined(__clang__)
  id += " clang " __clang_version__;
#elif defined(__GNUC__)
  id += " gcc " __VERSION__;
#endif
  id += " kernels=";
  id += kernels::isa_name(kernels::active_isa());
  return id;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::vector<std::string> trace_columns(std::size_t n) {
  std::vector<std::string> cols{"t"};
  for (const char* prefix : {"S_", "m_", "x_", "X_", "alpha_hat_"}) {
    for (std::size_t i = 0; i < n; ++i) cols.push_back(prefix + std::to_string(i));
  }
  for (const char* c : {"U_smoothed", "U_running_avg", "receive_ms", "verify_ms", "send_ms", "total_ms",
                        "scheduler", "seed"})
    cols.emplace_back(c);
  return cols;
}

namespace {

template <typename T>
void csv_values(std::ostream& out, const std::vector<T>& v) {
  for (const T& x : v) {
    if constexpr (std::is_floating_point_v<T>) {
      out << ',' << format_double(x);
    } else {
      out << ',' << x;
    }
  }
}

template <typename T>
void json_array(std::ostream& out, const std::vector<T>& v) {
  out << '[';
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out << ',';
    if constexpr (std::is_floating_point_v<T>) {
      out << format_double(v[i]);
    } else {
      out << v[i];
    }
  }
  out << ']';
}

}  // namespace

CsvTraceWriter::CsvTraceWriter(std::ostream& out, const ExperimentConfig& config)
    : out_(out), scheduler_(scheduler_name(config.scheduler)), seed_(config.seed) {
  out_ << "# build: " << build_identifier() << '\n';
  out_ << "# config: " << to_json(config).dump() << '\n';
  const auto cols = trace_columns(config.clients);
  for (std::size_t i = 0; i < cols.size(); ++i) out_ << (i ? "," : "") << cols[i];
  out_ << '\n';
}

void CsvTraceWriter::write(const RoundRecord& r) {
  out_ << r.t;
  csv_values(out_, r.slots);
  csv_values(out_, r.accepted);
  csv_values(out_, r.realized);
  csv_values(out_, r.goodput_hat);
  csv_values(out_, r.alpha_hat);
  for (double v : {r.utility_smoothed, r.utility_running_avg, r.time.receive_ms, r.time.verify_ms,
                   r.time.send_ms, r.time.total_ms})
    out_ << ',' << format_double(v);
  out_ << ',' << scheduler_ << ',' << seed_ << '\n';
}

JsonlTraceWriter::JsonlTraceWriter(std::ostream& out, const ExperimentConfig& config)
    : out_(out), scheduler_(scheduler_name(config.scheduler)), seed_(config.seed) {
  ordered_json header;
  header["build"] = build_identifier();
  header["config"] = to_json(config);
  header["columns"] = {"t",         "S",         "m",        "x",       "X",
                       "alpha_hat", "U_smoothed", "U_running_avg", "receive_ms", "verify_ms",
                       "send_ms",   "total_ms",  "scheduler", "seed"};
  out_ << header.dump() << '\n';
}

void JsonlTraceWriter::write(const RoundRecord& r) {
  out_ << "{\"t\":" << r.t << ",\"S\":";
  json_array(out_, r.slots);
  out_ << ",\"m\":";
  json_array(out_, r.accepted);
  out_ << ",\"x\":";
  json_array(out_, r.realized);
  out_ << ",\"X\":";
  json_array(out_, r.goodput_hat);
  out_ << ",\"alpha_hat\":";
  json_array(out_, r.alpha_hat);
  out_ << ",\"U_smoothed\":" << format_double(r.utility_smoothed)
       << ",\"U_running_avg\":" << format_double(r.utility_running_avg)
       << ",\"receive_ms\":" << format_double(r.time.receive_ms)
       << ",\"verify_ms\":" << format_double(r.time.verify_ms)
       << ",\"send_ms\":" << format_double(r.time.send_ms)
       << ",\"total_ms\":" << format_double(r.time.total_ms) << ",\"scheduler\":\"" << scheduler_
       << "\",\"seed\":" << seed_ << "}\n";
}

std::string trace_body(const std::string& contents) {
  std::istringstream in(contents);
  std::ostringstream out;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.rfind("# build:", 0) == 0) continue;
    if (first && line.rfind("{\"build\":", 0) == 0) {
      auto header = ordered_json::parse(line);
      header.erase("build");
      line = header.dump();
    }
    first = false;
    out << line << '\n';
  }
  return out.str();
}

}  // namespace fairspec
