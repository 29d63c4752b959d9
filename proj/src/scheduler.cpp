#include "fairspec/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

#include "fairspec/error.hpp"
#include "fairspec/estimator.hpp"
#include "fairspec/kernels.hpp"

namespace fairspec {

std::uint64_t ScheduleDecision::total() const noexcept {
  return std::accumulate(slots.begin(), slots.end(), std::uint64_t{0});
}

void SchedulerInput::validate() const {
  if (weights.empty()) throw InvalidArgument("scheduler needs at least one client");
  if (weights.size() != alphas.size()) throw InvalidArgument("weights and alphas differ in length");
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) throw InvalidArgument("weights must be finite and positive");
  }
  for (double a : alphas) {
    if (!(a > 0.0 && a < 1.0)) throw InvalidArgument("alphas must lie in (0, 1)");
  }
}

double utility_log(std::span<const double> x) {
  double u = 0.0;
  for (double v : x) {
    if (!(v > 0.0)) throw InvalidArgument("log utility needs positive goodput");
    u += std::log(v);
  }
  return u;
}

std::vector<double> gradient_log(std::span<const double> x) {
  std::vector<double> g(x.size());
  kernels::reciprocal(x, g);
  return g;
}

double schedule_objective(const SchedulerInput& input, const ScheduleDecision& decision) {
  double value = 0.0;
  for (std::size_t i = 0; i < decision.size(); ++i)
    value += input.weights[i] * expected_goodput(input.alphas[i], decision.slots[i]);
  return value;
}

ScheduleResult goodspeed_schedule(const SchedulerInput& input) {
  input.validate();
  const std::size_t n = input.weights.size();

  struct Candidate {
    double gain;
    std::size_t client;
  };
  // Max-heap on gain; among equal gains the lowest index surfaces first.
  auto lower_priority = [](const Candidate& a, const Candidate& b) {
    if (a.gain != b.gain) return a.gain < b.gain;
    return a.client > b.client;
  };
  std::priority_queue<Candidate, std::vector<Candidate>, decltype(lower_priority)> heap(
      lower_priority);
  for (std::size_t i = 0; i < n; ++i) heap.push({input.weights[i] * input.alphas[i], i});

  ScheduleResult result;
  result.decision.slots.assign(n, 0);
  for (std::uint32_t granted = 0; granted < input.capacity; ++granted) {
    Candidate best = heap.top();
    if (!(best.gain > 0.0)) break;  // every remaining marginal gain underflowed
    heap.pop();
    ++result.decision.slots[best.client];
    heap.push({best.gain * input.alphas[best.client], best.client});
  }
  result.objective = schedule_objective(input, result.decision);
  return result;
}

namespace {

// Visits every composition with sum <= budget in lexicographic order.
template <typename Visit>
void for_each_allocation(std::size_t n, std::uint32_t budget, Visit&& visit) {
  std::vector<std::uint32_t> slots(n, 0);
  auto recurse = [&](auto&& self, std::size_t i, std::uint32_t left) -> void {
    if (i == n) {
      visit(slots);
      return;
    }
    for (std::uint32_t s = 0; s <= left; ++s) {
      slots[i] = s;
      self(self, i + 1, left - s);
    }
    slots[i] = 0;
  };
  recurse(recurse, 0, budget);
}

}  // namespace

ScheduleResult brute_force_schedule(const SchedulerInput& input) {
  input.validate();
  const std::size_t n = input.weights.size();
  if (n > kBruteForceMaxClients || input.capacity > kBruteForceMaxCapacity)
    throw SizeGuardError("brute-force search is limited to N <= 6 and C <= 16");

  ScheduleResult best;
  best.objective = -1.0;
  ScheduleDecision current;
  for_each_allocation(n, input.capacity, [&](const std::vector<std::uint32_t>& slots) {
    current.slots = slots;
    const double value = schedule_objective(input, current);
    // Lexicographic visiting order means strict '>' keeps the smallest tie.
    if (value > best.objective) {
      best.objective = value;
      best.decision = current;
    }
  });
  return best;
}

ScheduleDecision fixed_schedule(std::size_t num_clients, std::uint32_t capacity) {
  if (num_clients == 0) throw InvalidArgument("need at least one client");
  const auto n = static_cast<std::uint32_t>(num_clients);
  ScheduleDecision d;
  d.slots.assign(num_clients, capacity / n);
  for (std::uint32_t i = 0; i < capacity % n; ++i) ++d.slots[i];
  return d;
}

ScheduleDecision random_schedule(std::size_t num_clients, std::uint32_t capacity, RandomStream& rng) {
  if (num_clients == 0) throw InvalidArgument("need at least one client");
  // Choose N-1 bar positions among C+N-1 cells uniformly (partial Fisher-Yates);
  // the gaps between bars are the parts.
  const std::size_t cells = capacity + num_clients - 1;
  const std::size_t bars = num_clients - 1;
  std::vector<std::size_t> pool(cells);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < bars; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(cells - i));
    std::swap(pool[i], pool[j]);
  }
  std::vector<std::size_t> chosen(pool.begin(), pool.begin() + static_cast<long>(bars));
  std::sort(chosen.begin(), chosen.end());

  ScheduleDecision d;
  d.slots.reserve(num_clients);
  std::size_t prev = 0;
  for (std::size_t b : chosen) {
    d.slots.push_back(static_cast<std::uint32_t>(b - prev));
    prev = b + 1;
  }
  d.slots.push_back(static_cast<std::uint32_t>(cells - prev));
  return d;
}

}  // namespace fairspec
