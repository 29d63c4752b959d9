#include "fairspec/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "fairspec/error.hpp"

namespace fairspec {

using nlohmann::json;

std::string_view scheduler_name(SchedulerKind kind) noexcept {
  switch (kind) {
    case SchedulerKind::kGoodSpeed:
      return "goodspeed";
    case SchedulerKind::kFixed:
      return "fixed";
    case SchedulerKind::kRandom:
      return "random";
  }
  return "goodspeed";
}

std::optional<SchedulerKind> parse_scheduler(std::string_view name) noexcept {
  if (name == "goodspeed") return SchedulerKind::kGoodSpeed;
  if (name == "fixed") return SchedulerKind::kFixed;
  if (name == "random") return SchedulerKind::kRandom;
  return std::nullopt;
}

LatencyParams LatencyParams::uniform(std::size_t num_clients, double draft_ms_per_token,
                                     double uplink_ms, double uplink_ms_per_token) {
  LatencyParams p;
  p.draft_ms_per_token.assign(num_clients, draft_ms_per_token);
  p.uplink_ms.assign(num_clients, uplink_ms);
  p.uplink_ms_per_token.assign(num_clients, uplink_ms_per_token);
  return p;
}

void LatencyParams::validate(std::size_t num_clients) const {
  auto check = [&](const std::vector<double>& v, const char* name) {
    if (v.size() != num_clients) throw InvalidArgument(std::string(name) + " needs one entry per client");
    for (double x : v) {
      if (!(x >= 0.0) || !std::isfinite(x)) throw InvalidArgument(std::string(name) + " must be non-negative");
    }
  };
  check(draft_ms_per_token, "draft_ms_per_token");
  check(uplink_ms, "uplink_ms");
  check(uplink_ms_per_token, "uplink_ms_per_token");
  for (double x : {verify_fixed_ms, verify_ms_per_token, send_ms}) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw InvalidArgument("latency costs must be non-negative");
  }
}

LatencyParams ExperimentConfig::resolved_latency() const {
  return latency ? *latency : LatencyParams::uniform(clients);
}

std::vector<double> resolve_levels(const ProfileSpec& spec, std::size_t num_clients) {
  if (!spec.levels.empty()) return spec.levels;
  if (spec.spread) {
    const auto [lo, hi] = *spec.spread;
    std::vector<double> out(num_clients);
    for (std::size_t i = 0; i < num_clients; ++i)
      out[i] = num_clients == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(num_clients - 1);
    return out;
  }
  return {};
}

AcceptanceProfile build_profile(const ProfileSpec& spec, std::size_t num_clients) {
  using Kind = AcceptanceProfile::Kind;
  const std::vector<double> levels = resolve_levels(spec, num_clients);
  switch (spec.kind) {
    case Kind::kStationary:
      return AcceptanceProfile::stationary(levels);
    case Kind::kPiecewise:
      return AcceptanceProfile::piecewise(spec.segments);
    case Kind::kRandomWalk: {
      std::vector<RandomWalkSpec> walks(num_clients);
      for (std::size_t i = 0; i < num_clients; ++i) {
        walks[i].step = spec.walk_step;
        walks[i].low = spec.walk_low;
        walks[i].high = spec.walk_high;
        walks[i].start = i < levels.size() ? levels[i] : 0.5 * (spec.walk_low + spec.walk_high);
      }
      return AcceptanceProfile::random_walk(std::move(walks));
    }
    case Kind::kTokenModel: {
      std::vector<ModelPair> models;
      models.reserve(num_clients);
      for (std::size_t i = 0; i < num_clients; ++i) {
        const double level = i < levels.size() ? levels[i] : 0.5;
        if (spec.constant_ratio) {
          models.push_back(constant_ratio_pair(spec.vocab_size, level));
        } else {
          RandomStream rng = RandomStream::derive(spec.model_seed, {i});
          models.push_back(synthetic_pair(spec.vocab_size, level, spec.concentration, rng));
        }
      }
      return AcceptanceProfile::token_model(std::move(models));
    }
  }
  return {};
}

namespace {

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

// Reads an object, remembering which keys were consumed so leftovers can be rejected.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  std::string key_path(const std::string& key) const { return join(path_, key); }

  double number(const std::string& key, double fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_number()) throw ConfigError(key_path(key), "expected a number");
    return v->get<double>();
  }

  std::uint64_t unsigned_int(const std::string& key, std::uint64_t fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_number_unsigned()) throw ConfigError(key_path(key), "expected a non-negative integer");
    return v->get<std::uint64_t>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_string()) throw ConfigError(key_path(key), "expected a string");
    return v->get<std::string>();
  }

  bool boolean(const std::string& key, bool fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_boolean()) throw ConfigError(key_path(key), "expected true or false");
    return v->get<bool>();
  }

  std::vector<double> numbers(const std::string& key) {
    const json* v = find(key);
    if (!v) return {};
    if (!v->is_array()) throw ConfigError(key_path(key), "expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : *v) {
      if (!e.is_number()) throw ConfigError(key_path(key), "expected an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(key_path(it.key()), "unknown key");
    }
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

StepSchedule parse_step(const json& v, const std::string& path, StepSchedule fallback) {
  if (v.is_number()) return StepSchedule::constant(v.get<double>());
  ObjectReader r(v, path);
  const std::string kind = r.string("kind", "constant");
  StepSchedule s = fallback;
  if (kind == "constant") {
    s = StepSchedule::constant(r.number("value", fallback.value));
  } else if (kind == "decay") {
    s = StepSchedule::decay(r.number("scale", 1.0), r.number("exponent", 1.0));
  } else {
    throw ConfigError(join(path, "kind"), "expected \"constant\" or \"decay\"");
  }
  r.finish();
  return s;
}

std::vector<double> scalar_or_vector(ObjectReader& r, const std::string& key, double fallback,
                                     std::size_t n) {
  const json* v = r.find(key);
  if (!v) return std::vector<double>(n, fallback);
  if (v->is_number()) return std::vector<double>(n, v->get<double>());
  return r.numbers(key);
}

ProfileSpec parse_profile(const json& v, const std::string& path) {
  using Kind = AcceptanceProfile::Kind;
  ObjectReader r(v, path);
  ProfileSpec spec;
  const std::string kind = r.string("kind", "stationary");
  if (kind == "stationary") {
    spec.kind = Kind::kStationary;
  } else if (kind == "piecewise") {
    spec.kind = Kind::kPiecewise;
  } else if (kind == "random-walk") {
    spec.kind = Kind::kRandomWalk;
  } else if (kind == "token-model") {
    spec.kind = Kind::kTokenModel;
  } else {
    throw ConfigError(r.key_path("kind"),
                      "expected one of stationary, piecewise, random-walk, token-model");
  }

  spec.levels = r.numbers("levels");
  if (const json* s = r.find("spread")) {
    if (!s->is_array() || s->size() != 2 || !(*s)[0].is_number() || !(*s)[1].is_number())
      throw ConfigError(r.key_path("spread"), "expected [low, high]");
    spec.spread = std::array<double, 2>{(*s)[0].get<double>(), (*s)[1].get<double>()};
  }

  if (spec.kind == Kind::kPiecewise) {
    const json* segs = r.find("segments");
    if (!segs || !segs->is_array()) throw ConfigError(r.key_path("segments"), "expected one segment list per client");
    for (std::size_t i = 0; i < segs->size(); ++i) {
      const std::string client_path = r.key_path("segments") + "[" + std::to_string(i) + "]";
      if (!(*segs)[i].is_array()) throw ConfigError(client_path, "expected an array of segments");
      std::vector<PiecewiseSegment> list;
      for (std::size_t j = 0; j < (*segs)[i].size(); ++j) {
        ObjectReader sr((*segs)[i][j], client_path + "[" + std::to_string(j) + "]");
        PiecewiseSegment seg;
        seg.start = sr.unsigned_int("start", 0);
        seg.level = sr.number("level", 0.5);
        sr.finish();
        list.push_back(seg);
      }
      spec.segments.push_back(std::move(list));
    }
  }
  if (spec.kind == Kind::kRandomWalk) {
    spec.walk_step = r.number("step", spec.walk_step);
    spec.walk_low = r.number("low", spec.walk_low);
    spec.walk_high = r.number("high", spec.walk_high);
  }
  if (spec.kind == Kind::kTokenModel) {
    spec.vocab_size = r.unsigned_int("vocab_size", spec.vocab_size);
    spec.concentration = r.number("concentration", spec.concentration);
    spec.model_seed = r.unsigned_int("model_seed", spec.model_seed);
    spec.constant_ratio = r.boolean("constant_ratio", spec.constant_ratio);
  }
  r.finish();
  return spec;
}

}  // namespace

ExperimentConfig parse_config(const json& doc) {
  ObjectReader r(doc, "");
  ExperimentConfig c;
  c.scenario = r.string("scenario", c.scenario);
  c.clients = r.unsigned_int("clients", c.clients);
  const std::uint64_t capacity = r.unsigned_int("capacity", c.capacity);
  if (capacity > 1000000) throw ConfigError("capacity", "too large");
  c.capacity = static_cast<std::uint32_t>(capacity);
  c.rounds = r.unsigned_int("rounds", c.rounds);

  const std::string sched = r.string("scheduler", "goodspeed");
  if (auto k = parse_scheduler(sched)) {
    c.scheduler = *k;
  } else {
    throw ConfigError("scheduler", "expected goodspeed, fixed or random");
  }
  if (const json* list = r.find("compare")) {
    if (!list->is_array()) throw ConfigError("compare", "expected an array of scheduler names");
    for (const auto& e : *list) {
      auto k = e.is_string() ? parse_scheduler(e.get<std::string>()) : std::nullopt;
      if (!k) throw ConfigError("compare", "expected goodspeed, fixed or random");
      c.compare.push_back(*k);
    }
  }
  c.utility = r.string("utility", c.utility);

  if (const json* s = r.find("smoothing")) {
    ObjectReader sr(*s, "smoothing");
    if (const json* e = sr.find("eta")) c.smoothing.eta = parse_step(*e, "smoothing.eta", c.smoothing.eta);
    if (const json* b = sr.find("beta")) c.smoothing.beta = parse_step(*b, "smoothing.beta", c.smoothing.beta);
    sr.finish();
  }
  if (const json* p = r.find("profile")) c.profile = parse_profile(*p, "profile");

  if (const json* l = r.find("latency")) {
    ObjectReader lr(*l, "latency");
    LatencyParams lat;
    lat.draft_ms_per_token = scalar_or_vector(lr, "draft_ms_per_token", 8.0, c.clients);
    lat.uplink_ms = scalar_or_vector(lr, "uplink_ms", 5.0, c.clients);
    lat.uplink_ms_per_token = scalar_or_vector(lr, "uplink_ms_per_token", 0.0, c.clients);
    lat.verify_fixed_ms = lr.number("verify_fixed_ms", lat.verify_fixed_ms);
    lat.verify_ms_per_token = lr.number("verify_ms_per_token", lat.verify_ms_per_token);
    lat.send_ms = lr.number("send_ms", lat.send_ms);
    lr.finish();
    c.latency = std::move(lat);
  }

  c.seed = r.unsigned_int("seed", c.seed);
  if (const json* o = r.find("output")) {
    ObjectReader orr(*o, "output");
    c.output_dir = orr.string("dir", c.output_dir);
    c.format = orr.string("format", c.format);
    orr.finish();
  }
  if (const json* o = r.find("oracle")) {
    ObjectReader orr(*o, "oracle");
    c.oracle.max_iters = orr.unsigned_int("max_iters", c.oracle.max_iters);
    c.oracle.gap_tol = orr.number("gap_tol", c.oracle.gap_tol);
    c.oracle.cross_check = orr.boolean("cross_check", c.oracle.cross_check);
    c.oracle.restarts = static_cast<std::uint32_t>(orr.unsigned_int("restarts", c.oracle.restarts));
    orr.finish();
  }
  if (const json* s = r.find("sweep")) {
    ObjectReader sr(*s, "sweep");
    SweepSettings sw;
    sw.parameter = sr.string("parameter", "");
    sw.values = sr.numbers("values");
    sr.finish();
    c.sweep = std::move(sw);
  }
  r.finish();
  validate_config(c);
  return c;
}

ExperimentConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed config: ") + e.what());
  }
  return parse_config(doc);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

void validate_config(const ExperimentConfig& c) {
  using Kind = AcceptanceProfile::Kind;
  if (c.clients < 1) throw ConfigError("clients", "must be at least 1");
  if (c.capacity < 1) throw ConfigError("capacity", "must be at least 1");
  if (c.utility != "log") throw ConfigError("utility", "only \"log\" is supported");
  if (c.format != "csv" && c.format != "jsonl") throw ConfigError("output.format", "expected csv or jsonl");
  if (!(c.oracle.gap_tol >= 0.0)) throw ConfigError("oracle.gap_tol", "must be non-negative");
  try {
    c.smoothing.eta.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError("smoothing.eta", e.what());
  }
  try {
    c.smoothing.beta.validate();
    c.smoothing.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError("smoothing.beta", e.what());
  }
  if (c.latency) {
    try {
      c.latency->validate(c.clients);
    } catch (const InvalidArgument& e) {
      throw ConfigError("latency", e.what());
    }
  }

  const ProfileSpec& p = c.profile;
  if (!p.levels.empty() && p.spread) throw ConfigError("profile", "give either levels or spread, not both");
  if (p.spread) {
    const auto [lo, hi] = *p.spread;
    if (!(lo <= hi)) throw ConfigError("profile.spread", "low must not exceed high");
  }
  const std::vector<double> levels = resolve_levels(p, c.clients);
  if (!levels.empty() && levels.size() != c.clients)
    throw ConfigError(p.spread ? "profile.spread" : "profile.levels", "needs one entry per client");

  auto in_alpha_range = [](double a) { return a >= kProfileAlphaLow && a <= kProfileAlphaHigh; };
  const std::string level_key = p.spread ? "profile.spread" : "profile.levels";
  switch (p.kind) {
    case Kind::kStationary:
      if (levels.empty()) throw ConfigError("profile.levels", "stationary profile needs levels or spread");
      for (double a : levels) {
        if (!in_alpha_range(a)) throw ConfigError(level_key, "acceptance levels must lie in [0.05, 0.95]");
      }
      break;
    case Kind::kPiecewise:
      if (p.segments.size() != c.clients) throw ConfigError("profile.segments", "needs one segment list per client");
      for (const auto& segs : p.segments) {
        if (segs.empty() || segs.front().start != 0)
          throw ConfigError("profile.segments", "each client's first segment must start at round 0");
        for (std::size_t j = 0; j < segs.size(); ++j) {
          if (!in_alpha_range(segs[j].level))
            throw ConfigError("profile.segments", "acceptance levels must lie in [0.05, 0.95]");
          if (j > 0 && segs[j].start <= segs[j - 1].start)
            throw ConfigError("profile.segments", "switch times must be strictly increasing");
        }
      }
      break;
    case Kind::kRandomWalk:
      if (!(p.walk_low >= kProfileAlphaLow && p.walk_high <= kProfileAlphaHigh && p.walk_low < p.walk_high))
        throw ConfigError("profile.low", "walk bounds must satisfy 0.05 <= low < high <= 0.95");
      if (!(p.walk_step > 0.0 && p.walk_step < p.walk_high - p.walk_low))
        throw ConfigError("profile.step", "must be positive and smaller than high - low");
      for (double a : levels) {
        if (!(a >= p.walk_low && a <= p.walk_high)) throw ConfigError(level_key, "walk start outside [low, high]");
      }
      break;
    case Kind::kTokenModel:
      if (p.vocab_size < 2 || p.vocab_size > 32) throw ConfigError("profile.vocab_size", "must lie in [2, 32]");
      if (!(p.concentration > 0.0)) throw ConfigError("profile.concentration", "must be positive");
      for (double a : levels) {
        if (p.constant_ratio ? !in_alpha_range(a) : !(a >= 0.0 && a <= 1.0))
          throw ConfigError(level_key, p.constant_ratio ? "constant-ratio alphas must lie in [0.05, 0.95]"
                                                        : "agreement must lie in [0, 1]");
      }
      break;
  }

  if (c.sweep) {
    static const std::set<std::string> known{"beta", "eta", "capacity", "clients"};
    if (!known.count(c.sweep->parameter))
      throw ConfigError("sweep.parameter", "expected beta, eta, capacity or clients");
  }
}

namespace {

ordered_json step_json(const StepSchedule& s) {
  ordered_json j;
  if (s.kind == StepSchedule::Kind::kConstant) {
    j["kind"] = "constant";
    j["value"] = s.value;
  } else {
    j["kind"] = "decay";
    j["scale"] = s.value;
    j["exponent"] = s.exponent;
  }
  return j;
}

const char* profile_kind_name(AcceptanceProfile::Kind k) {
  switch (k) {
    case AcceptanceProfile::Kind::kStationary:
      return "stationary";
    case AcceptanceProfile::Kind::kPiecewise:
      return "piecewise";
    case AcceptanceProfile::Kind::kRandomWalk:
      return "random-walk";
    case AcceptanceProfile::Kind::kTokenModel:
      return "token-model";
  }
  return "stationary";
}

}  // namespace

ordered_json to_json(const ExperimentConfig& c) {
  using Kind = AcceptanceProfile::Kind;
  ordered_json j;
  j["scenario"] = c.scenario;
  j["clients"] = c.clients;
  j["capacity"] = c.capacity;
  j["rounds"] = c.rounds;
  j["scheduler"] = scheduler_name(c.scheduler);
  ordered_json cmp = ordered_json::array();
  for (auto k : c.compare) cmp.push_back(scheduler_name(k));
  j["compare"] = cmp;
  j["utility"] = c.utility;
  j["smoothing"] = {{"eta", step_json(c.smoothing.eta)}, {"beta", step_json(c.smoothing.beta)}};

  ordered_json p;
  p["kind"] = profile_kind_name(c.profile.kind);
  if (c.profile.kind != Kind::kPiecewise) p["levels"] = resolve_levels(c.profile, c.clients);
  if (c.profile.kind == Kind::kPiecewise) {
    ordered_json segs = ordered_json::array();
    for (const auto& list : c.profile.segments) {
      ordered_json l = ordered_json::array();
      for (const auto& s : list) l.push_back({{"start", s.start}, {"level", s.level}});
      segs.push_back(l);
    }
    p["segments"] = segs;
  }
  if (c.profile.kind == Kind::kRandomWalk) {
    p["step"] = c.profile.walk_step;
    p["low"] = c.profile.walk_low;
    p["high"] = c.profile.walk_high;
  }
  if (c.profile.kind == Kind::kTokenModel) {
    p["vocab_size"] = c.profile.vocab_size;
    p["concentration"] = c.profile.concentration;
    p["model_seed"] = c.profile.model_seed;
    p["constant_ratio"] = c.profile.constant_ratio;
  }
  j["profile"] = p;

  const LatencyParams lat = c.resolved_latency();
  j["latency"] = {{"draft_ms_per_token", lat.draft_ms_per_token},
                  {"uplink_ms", lat.uplink_ms},
                  {"uplink_ms_per_token", lat.uplink_ms_per_token},
                  {"verify_fixed_ms", lat.verify_fixed_ms},
                  {"verify_ms_per_token", lat.verify_ms_per_token},
                  {"send_ms", lat.send_ms}};
  j["seed"] = c.seed;
  j["output"] = {{"dir", c.output_dir}, {"format", c.format}};
  j["oracle"] = {{"max_iters", c.oracle.max_iters},
                 {"gap_tol", c.oracle.gap_tol},
                 {"cross_check", c.oracle.cross_check},
                 {"restarts", c.oracle.restarts}};
  if (c.sweep) j["sweep"] = {{"parameter", c.sweep->parameter}, {"values", c.sweep->values}};
  return j;
}

}  // namespace fairspec
