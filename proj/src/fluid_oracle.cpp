#include "fairspec/fluid_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>

#include "fairspec/error.hpp"
#include "fairspec/estimator.hpp"
#include "fairspec/kernels.hpp"

namespace fairspec {

void RegionSpec::validate() const {
  if (alphas.empty()) throw InvalidArgument("region needs at least one client");
  for (double a : alphas) {
    if (!(a > 0.0 && a < 1.0)) throw InvalidArgument("alphas must lie in (0, 1)");
  }
}

GoodputPoint goodput_vertex(const ScheduleDecision& decision, const RegionSpec& region) {
  if (decision.size() != region.num_clients())
    throw BudgetViolation("decision length does not match the client count");
  if (decision.total() > region.capacity)
    throw BudgetViolation("decision uses " + std::to_string(decision.total()) + " slots, capacity is " +
                          std::to_string(region.capacity));
  GoodputPoint p;
  p.values.resize(decision.size());
  for (std::size_t i = 0; i < decision.size(); ++i)
    p.values[i] = expected_goodput(region.alphas[i], decision.slots[i]);
  return p;
}

double goodput_upper_bound(std::uint32_t capacity) { return expected_goodput(kAlphaMax, capacity); }

namespace {

double sum_log(const std::vector<double>& x) {
  double u = 0.0;
  for (double v : x) u += std::log(v);
  return u;
}

// argmax of sum_i log(x_i + gamma d_i) on [0, gamma_max]; the derivative is
// strictly decreasing so bisection on its sign is exact up to rounding.
double line_search(const std::vector<double>& x, const std::vector<double>& d, double gamma_max) {
  auto slope = [&](double gamma) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += d[i] / (x[i] + gamma * d[i]);
    return s;
  };
  if (slope(0.0) <= 0.0) return 0.0;
  if (slope(gamma_max) >= 0.0) return gamma_max;
  double lo = 0.0;
  double hi = gamma_max;
  for (int it = 0; it < 200 && hi - lo > 1e-17 * gamma_max; ++it) {
    const double mid = 0.5 * (lo + hi);
    (slope(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

FrankWolfeResult solve_optimal_goodput(const RegionSpec& region, const FrankWolfeOptions& options) {
  region.validate();
  if (!(options.gap_tol >= 0.0)) throw InvalidArgument("gap_tol must be non-negative");
  const std::size_t n = region.num_clients();

  std::map<ScheduleDecision, std::vector<double>> vertices;
  auto vertex = [&](const ScheduleDecision& k) -> const std::vector<double>& {
    auto it = vertices.find(k);
    if (it == vertices.end()) it = vertices.emplace(k, goodput_vertex(k, region).values).first;
    return it->second;
  };

  const ScheduleDecision start = fixed_schedule(n, region.capacity);
  std::map<ScheduleDecision, double> active{{start, 1.0}};
  std::vector<double> x = vertex(start);
  std::vector<double> direction(n);

  auto rebuild_iterate = [&] {
    std::fill(x.begin(), x.end(), 0.0);
    for (const auto& [k, w] : active) kernels::axpy(w, vertex(k), x);
  };

  FrankWolfeResult result;
  double gap = 0.0;
  std::uint64_t iter = 0;
  for (;; ++iter) {
    const std::vector<double> weights = gradient_log(x);
    const ScheduleDecision fw_vertex =
        goodspeed_schedule({weights, region.alphas, region.capacity}).decision;
    const std::vector<double>& v = vertex(fw_vertex);
    for (std::size_t i = 0; i < n; ++i) direction[i] = v[i] - x[i];
    gap = std::max(0.0, kernels::dot(weights, direction));
    if (options.objective_trace) options.objective_trace->push_back(sum_log(x));
    if (gap <= options.gap_tol) {
      result.converged = true;
      break;
    }
    if (iter == options.max_iters) break;

    if (options.step_rule == StepRule::kOpenLoop) {
      kernels::lerp(x, v, 2.0 / (static_cast<double>(iter) + 2.0));
      continue;
    }

    // Away vertex: the active vertex worst aligned with the gradient.
    auto away = active.begin();
    double away_score = kernels::dot(weights, vertex(away->first));
    for (auto it = std::next(active.begin()); it != active.end(); ++it) {
      const double s = kernels::dot(weights, vertex(it->first));
      if (s < away_score) {
        away_score = s;
        away = it;
      }
    }
    const double away_gap = kernels::dot(weights, x) - away_score;

    if (gap >= away_gap || active.size() == 1) {
      const double gamma = line_search(x, direction, 1.0);
      if (gamma >= 1.0) {
        active.clear();
        active.emplace(fw_vertex, 1.0);
      } else {
        for (auto& entry : active) entry.second *= 1.0 - gamma;
        active[fw_vertex] += gamma;
      }
    } else {
      const double away_weight = away->second;
      const double gamma_max = away_weight / (1.0 - away_weight);
      const std::vector<double>& a = vertex(away->first);
      for (std::size_t i = 0; i < n; ++i) direction[i] = x[i] - a[i];
      const double gamma = line_search(x, direction, gamma_max);
      for (auto& entry : active) entry.second *= 1.0 + gamma;
      if (gamma >= gamma_max) {
        active.erase(away);
      } else {
        away->second -= gamma;
      }
    }
    rebuild_iterate();
  }

  result.iterations = iter;
  result.point.values = x;
  result.point.fw_gap = gap;
  result.utility = sum_log(x);
  return result;
}

bool within_enumeration_guard(std::size_t num_clients, std::uint32_t capacity) noexcept {
  return num_clients >= 1 && num_clients <= kEnumerationMaxClients && capacity <= kEnumerationMaxCapacity;
}

std::vector<ScheduleDecision> enumerate_decisions(std::size_t num_clients, std::uint32_t capacity) {
  if (!within_enumeration_guard(num_clients, capacity))
    throw SizeGuardError("enumeration is limited to 1 <= N <= 6 and C <= 16");
  std::vector<ScheduleDecision> out;
  ScheduleDecision current;
  current.slots.assign(num_clients, 0);
  std::function<void(std::size_t, std::uint32_t)> recurse = [&](std::size_t i, std::uint32_t left) {
    if (i == num_clients) {
      out.push_back(current);
      return;
    }
    for (std::uint32_t s = 0; s <= left; ++s) {
      current.slots[i] = s;
      recurse(i + 1, left - s);
    }
    current.slots[i] = 0;
  };
  recurse(0, capacity);
  return out;
}

void project_to_simplex(std::vector<double>& v) {
  std::vector<double> sorted(v);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < sorted.size(); ++j) {
    cumulative += sorted[j];
    const double t = (cumulative - 1.0) / static_cast<double>(j + 1);
    if (sorted[j] - t > 0.0) theta = t;
  }
  for (double& e : v) e = std::max(0.0, e - theta);
}

namespace {

class MixtureProblem {
 public:
  MixtureProblem(const RegionSpec& region, const std::vector<ScheduleDecision>& decisions)
      : n_(region.num_clients()), k_(decisions.size()), vertices_(k_ * n_) {
    for (std::size_t k = 0; k < k_; ++k) {
      const auto v = goodput_vertex(decisions[k], region).values;
      std::copy(v.begin(), v.end(), vertices_.begin() + static_cast<long>(k * n_));
    }
  }

  std::size_t num_vertices() const { return k_; }

  std::span<const double> vertex(std::size_t k) const { return {vertices_.data() + k * n_, n_}; }

  std::vector<double> point(const std::vector<double>& phi) const {
    std::vector<double> x(n_, 0.0);
    for (std::size_t k = 0; k < k_; ++k) {
      if (phi[k] != 0.0) kernels::axpy(phi[k], vertex(k), x);
    }
    return x;
  }

  double objective(const std::vector<double>& phi) const { return sum_log(point(phi)); }

  std::vector<double> gradient(const std::vector<double>& phi) const {
    const std::vector<double> inv = gradient_log(point(phi));
    std::vector<double> g(k_);
    for (std::size_t k = 0; k < k_; ++k) g[k] = kernels::dot(vertex(k), inv);
    return g;
  }

 private:
  std::size_t n_;
  std::size_t k_;
  std::vector<double> vertices_;
};

std::vector<double> ascend(const MixtureProblem& problem, std::vector<double> phi, double step) {
  constexpr int kMaxIters = 20000;
  double value = problem.objective(phi);
  int stalled = 0;
  for (int it = 0; it < kMaxIters && stalled < 20; ++it) {
    const std::vector<double> grad = problem.gradient(phi);
    for (int backtrack = 0; backtrack < 60; ++backtrack) {
      std::vector<double> trial(phi);
      kernels::axpy(step, grad, trial);
      project_to_simplex(trial);
      double lin = 0.0;
      double sq = 0.0;
      for (std::size_t k = 0; k < phi.size(); ++k) {
        const double d = trial[k] - phi[k];
        lin += grad[k] * d;
        sq += d * d;
      }
      const double trial_value = problem.objective(trial);
      if (trial_value >= value + lin - sq / (2.0 * step)) {
        stalled = (trial_value - value <= 1e-14 * std::max(1.0, std::abs(value))) ? stalled + 1 : 0;
        phi.swap(trial);
        value = trial_value;
        step *= 1.5;
        break;
      }
      step *= 0.5;
    }
  }
  return phi;
}

}  // namespace

GoodputPoint small_instance_optimum(const RegionSpec& region, std::uint32_t restarts) {
  region.validate();
  const auto decisions = enumerate_decisions(region.num_clients(), region.capacity);
  const MixtureProblem problem(region, decisions);
  const std::size_t k = problem.num_vertices();

  // Gradient Lipschitz bound: x >= 1 componentwise and vertex entries <= upper bound.
  const double upper = goodput_upper_bound(region.capacity);
  const double step = 1.0 / (static_cast<double>(region.num_clients()) * upper * upper *
                             static_cast<double>(k));

  std::vector<std::vector<double>> starts;
  starts.emplace_back(k, 1.0 / static_cast<double>(k));
  {
    std::vector<double> at_fixed(k, 0.0);
    const auto fixed = fixed_schedule(region.num_clients(), region.capacity);
    at_fixed[static_cast<std::size_t>(std::find(decisions.begin(), decisions.end(), fixed) -
                                      decisions.begin())] = 1.0;
    starts.push_back(std::move(at_fixed));
  }
  RandomStream rng(0x5eedf00dULL);
  while (starts.size() < std::max<std::uint32_t>(restarts, 1)) {
    std::vector<double> phi(k);
    for (double& p : phi) p = -std::log(rng.uniform_open());
    const double total = kernels::sum(phi);
    kernels::scale(phi, 1.0 / total, phi);
    starts.push_back(std::move(phi));
  }
  starts.resize(std::max<std::uint32_t>(restarts, 1));

  GoodputPoint best;
  double best_value = -std::numeric_limits<double>::infinity();
  for (auto& start : starts) {
    const std::vector<double> phi = ascend(problem, std::move(start), step);
    const double value = problem.objective(phi);
    if (value > best_value) {
      best_value = value;
      best.values = problem.point(phi);
    }
  }
  return best;
}

}  // namespace fairspec
