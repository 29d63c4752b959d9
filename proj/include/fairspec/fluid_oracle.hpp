#pragma once

// Optimal long-run goodput x* = argmax sum_i log x_i over the goodput region:
// the convex hull of the expected-goodput vectors mu(k) of every feasible
// allocation k. Two independent solvers are provided:
//
//  * solve_optimal_goodput: Frank-Wolfe whose linear maximization oracle is
//    goodspeed_schedule itself (the best vertex for gradient weights 1/x).
//  * small_instance_optimum: projected-gradient ascent over explicit mixture
//    weights on every enumerated vertex (small instances only).

#include <cstdint>
#include <vector>

#include "fairspec/scheduler.hpp"

namespace fairspec {

struct GoodputPoint {
  std::vector<double> values;
  double fw_gap = 0.0;
};

struct RegionSpec {
  std::vector<double> alphas;  // long-run acceptance rates, in (0, 1)
  std::uint32_t capacity = 1;

  std::size_t num_clients() const noexcept { return alphas.size(); }
  void validate() const;
};

/// mu(k): values_i = expected_goodput(alphas_i, slots_i). Throws BudgetViolation
/// if the decision uses more than region.capacity slots or has the wrong length.
GoodputPoint goodput_vertex(const ScheduleDecision& decision, const RegionSpec& region);

/// Upper non-degeneracy bound (1 - a^{C+1}) / (1 - a) at a = kAlphaMax.
double goodput_upper_bound(std::uint32_t capacity);

enum class StepRule {
  kOpenLoop,          // gamma = 2 / (iter + 2)
  kAwayStepLineSearch,  // away-step variant with exact line search
};

struct FrankWolfeOptions {
  std::uint64_t max_iters = 100000;
  double gap_tol = 1e-6;
  StepRule step_rule = StepRule::kAwayStepLineSearch;
  /// When non-null, receives the objective after every iteration.
  std::vector<double>* objective_trace = nullptr;
};

struct FrankWolfeResult {
  GoodputPoint point;
  double utility = 0.0;
  std::uint64_t iterations = 0;
  bool converged = false;
};

FrankWolfeResult solve_optimal_goodput(const RegionSpec& region, const FrankWolfeOptions& options = {});

inline constexpr std::size_t kEnumerationMaxClients = 6;
inline constexpr std::uint32_t kEnumerationMaxCapacity = 16;

bool within_enumeration_guard(std::size_t num_clients, std::uint32_t capacity) noexcept;

/// Every allocation with sum <= C, lexicographic order; binomial(C + N, N) of them.
/// Throws SizeGuardError beyond N = 6 or C = 16.
std::vector<ScheduleDecision> enumerate_decisions(std::size_t num_clients, std::uint32_t capacity);

/// Best mixture found by projected-gradient ascent on the simplex of vertex
/// weights, from `restarts` starting points (uniform, the Fixed-S vertex, then
/// seeded random points). Throws SizeGuardError beyond the enumeration guard.
GoodputPoint small_instance_optimum(const RegionSpec& region, std::uint32_t restarts);

/// Euclidean projection onto the probability simplex (in place).
void project_to_simplex(std::vector<double>& v);

}  // namespace fairspec
