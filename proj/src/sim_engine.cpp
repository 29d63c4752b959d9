#include "fairspec/sim_engine.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fairspec/error.hpp"
#include "fairspec/kernels.hpp"

namespace fairspec {

namespace {

constexpr std::uint64_t kClientStreamTag = 0x636c69656e74ULL;  // "client"
constexpr std::uint64_t kScheduleStreamTag = 0x7363686564ULL;  // "sched"

struct ClientDraw {
  std::uint32_t accepted = 0;
  std::vector<double> ratios;
};

// Abstract mode: position j is accepted with probability alpha independently,
// so the accepted count is min(Geom(1 - alpha) - 1, S).
ClientDraw draw_abstract(double alpha, std::uint32_t slots, RandomStream& rng) {
  ClientDraw d;
  d.ratios.assign(slots, alpha);
  while (d.accepted < slots && rng.uniform_open() <= alpha) ++d.accepted;
  return d;
}

ClientDraw draw_token_model(const ModelPair& pair, TokenId& prefix, std::uint32_t slots,
                            RandomStream& rng) {
  const DraftResult draft = draft_sequence(pair.draft, prefix, slots, rng);
  const auto p = target_dists(pair.target, prefix, draft);
  VerifyOutcome outcome = verify_speculative(p, draft, rng);
  prefix = outcome.emitted_tokens.back();
  return {static_cast<std::uint32_t>(outcome.accepted_count), std::move(outcome.accept_ratios)};
}

}  // namespace

std::vector<double> RunningGoodput::mean() const {
  std::vector<double> m(sum);
  if (rounds > 0) kernels::scale(sum, 1.0 / static_cast<double>(rounds), m);
  return m;
}

std::vector<ClientState> initial_state(std::size_t num_clients, std::uint32_t capacity) {
  const ScheduleDecision split = fixed_schedule(num_clients, capacity);
  std::vector<ClientState> state(num_clients);
  for (std::size_t i = 0; i < num_clients; ++i) state[i].current_slots = split.slots[i];
  return state;
}

RoundRecord run_round(std::vector<ClientState>& state, AcceptanceProcess& process,
                      const SimParams& params, std::uint64_t t, RunningGoodput& running) {
  const std::size_t n = state.size();
  const AcceptanceProfile& profile = process.profile();
  if (profile.num_clients() != n) throw InvalidArgument("profile and state disagree on client count");
  if (t == 0) throw InvalidArgument("round index starts at 1");

  RoundRecord rec;
  rec.t = t;
  rec.slots.resize(n);
  std::uint64_t used = 0;
  for (std::size_t i = 0; i < n; ++i) {
    rec.slots[i] = state[i].current_slots;
    used += rec.slots[i];
  }
  if (used > params.capacity)
    throw BudgetViolation("round " + std::to_string(t) + " allocates " + std::to_string(used) +
                          " slots over capacity " + std::to_string(params.capacity));

  const double eta = smoothing_value(params.smoothing, SmoothedQuantity::kEta, t);
  const double beta = smoothing_value(params.smoothing, SmoothedQuantity::kBeta, t);

  rec.true_alpha.resize(n);
  rec.accepted.resize(n);
  rec.realized.resize(n);
  rec.alpha_hat.resize(n);
  rec.goodput_hat.resize(n);
  rec.expected.resize(n);
  if (running.sum.size() != n) running.sum.assign(n, 0.0);

  // Drafting and verification. Each client owns the substream (seed, client, t).
  for (std::size_t i = 0; i < n; ++i) {
    ClientState& c = state[i];
    RandomStream rng = RandomStream::derive(params.seed, {kClientStreamTag, i, t});
    const double alpha = process.alpha_at(i, t);
    rec.true_alpha[i] = alpha;
    ClientDraw draw = profile.kind == AcceptanceProfile::Kind::kTokenModel
                          ? draw_token_model(profile.models[i], c.prefix_last_token, c.current_slots, rng)
                          : draw_abstract(alpha, c.current_slots, rng);

    rec.accepted[i] = draw.accepted;
    rec.realized[i] = static_cast<double>(draw.accepted) + 1.0;
    const double clamped = std::clamp(alpha, kAlphaMin, kAlphaMax);
    rec.expected[i] = expected_goodput(clamped, c.current_slots);

    if (auto updated = update_acceptance(c.estimates.alpha_hat, draw.ratios, eta)) {
      c.estimates.alpha_hat = *updated;
    } else {
      ++c.zero_slot_rounds;
    }
    c.estimates.goodput_hat = update_goodput(c.estimates.goodput_hat, rec.realized[i], beta);
    rec.alpha_hat[i] = c.estimates.alpha_hat;
    rec.goodput_hat[i] = c.estimates.goodput_hat;
    running.sum[i] += rec.realized[i];
  }
  ++running.rounds;

  // Next allocation.
  ScheduleDecision next;
  switch (params.scheduler) {
    case SchedulerKind::kGoodSpeed:
      next = goodspeed_schedule({gradient_log(rec.goodput_hat), rec.alpha_hat, params.capacity}).decision;
      break;
    case SchedulerKind::kFixed:
      next = fixed_schedule(n, params.capacity);
      break;
    case SchedulerKind::kRandom: {
      RandomStream rng = RandomStream::derive(params.seed, {kScheduleStreamTag, t});
      next = random_schedule(n, params.capacity, rng);
      break;
    }
  }
  rec.next_slots = next.slots;
  for (std::size_t i = 0; i < n; ++i) state[i].current_slots = next.slots[i];

  rec.utility_smoothed = utility_log(rec.goodput_hat);
  rec.utility_running_avg = utility_log(running.mean());

  // Receive waits for the slowest client; verification is one batched pass.
  const LatencyParams& lat = params.latency;
  double receive = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = static_cast<double>(rec.slots[i]);
    receive = std::max(receive, lat.uplink_ms[i] + (lat.draft_ms_per_token[i] + lat.uplink_ms_per_token[i]) * s);
  }
  rec.time.receive_ms = receive;
  rec.time.verify_ms = lat.verify_fixed_ms + lat.verify_ms_per_token * static_cast<double>(used);
  rec.time.send_ms = lat.send_ms;
  rec.time.total_ms = rec.time.receive_ms + rec.time.verify_ms + rec.time.send_ms;
  return rec;
}

Simulation::Simulation(AcceptanceProfile profile, SimParams params)
    : profile_(std::make_unique<AcceptanceProfile>(std::move(profile))),
      params_(std::move(params)),
      process_(*profile_, params_.seed),
      state_(initial_state(profile_->num_clients(), params_.capacity)) {
  params_.smoothing.validate();
  params_.latency.validate(profile_->num_clients());
  if (params_.capacity < 1) throw InvalidArgument("capacity must be at least 1");
  running_.sum.assign(profile_->num_clients(), 0.0);
}

RoundRecord Simulation::step() {
  return run_round(state_, process_, params_, running_.rounds + 1, running_);
}

SimParams sim_params_from(const ExperimentConfig& config) {
  SimParams p;
  p.capacity = config.capacity;
  p.scheduler = config.scheduler;
  p.smoothing = config.smoothing;
  p.latency = config.resolved_latency();
  p.seed = config.seed;
  return p;
}

std::vector<RoundRecord> run_experiment(const ExperimentConfig& config, const TraceSink& sink) {
  validate_config(config);
  Simulation sim(build_profile(config.profile, config.clients), sim_params_from(config));
  std::vector<RoundRecord> trace;
  trace.reserve(config.rounds);
  for (std::uint64_t t = 1; t <= config.rounds; ++t) {
    trace.push_back(sim.step());
    if (sink) sink(trace.back());
  }
  return trace;
}

GoodputPoint empirical_average(std::span<const RoundRecord> trace, std::uint64_t T) {
  if (T < 1 || T > trace.size()) throw InvalidArgument("T must lie in [1, trace length]");
  GoodputPoint p;
  p.values.assign(trace.front().realized.size(), 0.0);
  for (std::uint64_t t = 0; t < T; ++t) kernels::axpy(1.0, trace[t].realized, p.values);
  kernels::scale(p.values, 1.0 / static_cast<double>(T), p.values);
  return p;
}

std::pair<std::vector<double>, std::vector<double>> ma_smooth(std::span<const double> series,
                                                              std::size_t window) {
  if (window < 1) throw InvalidArgument("window must be at least 1");
  std::vector<double> means(series.size());
  std::vector<double> stds(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) {
    const std::size_t lo = i + 1 >= window ? i + 1 - window : 0;
    const auto win = series.subspan(lo, i + 1 - lo);
    const double mean = kernels::sum(win) / static_cast<double>(win.size());
    double ss = 0.0;
    for (double v : win) ss += (v - mean) * (v - mean);
    means[i] = mean;
    stds[i] = win.size() > 1 ? std::sqrt(ss / static_cast<double>(win.size() - 1)) : 0.0;
  }
  return {std::move(means), std::move(stds)};
}

}  // namespace fairspec
