#pragma once

// Slot allocation under the verifier's per-round token budget C.
//
// goodspeed_schedule solves
//     max  sum_i w_i * (1 - a_i^{S_i+1}) / (1 - a_i)   s.t.  sum_i S_i <= C,  S_i in Z+
// where w_i is the log-utility gradient at the smoothed goodput of client i and
// a_i its smoothed acceptance rate. The objective is separable and each term has
// strictly decreasing marginal gains w_i * a_i^{s+1}, so granting slots one at a
// time to the largest marginal gain is exact.

#include <cstdint>
#include <span>
#include <vector>

#include "fairspec/rng.hpp"

namespace fairspec {

struct ScheduleDecision {
  std::vector<std::uint32_t> slots;

  std::size_t size() const noexcept { return slots.size(); }
  std::uint64_t total() const noexcept;

  friend bool operator==(const ScheduleDecision&, const ScheduleDecision&) = default;
  friend auto operator<=>(const ScheduleDecision&, const ScheduleDecision&) = default;
};

struct SchedulerInput {
  std::vector<double> weights;  // per-client utility gradients, > 0
  std::vector<double> alphas;   // per-client acceptance estimates, in (0, 1)
  std::uint32_t capacity = 1;

  /// Throws InvalidArgument if the invariants do not hold.
  void validate() const;
};

struct ScheduleResult {
  ScheduleDecision decision;
  double objective = 0.0;
};

/// sum_i log x_i. Throws InvalidArgument for a non-positive entry.
double utility_log(std::span<const double> x);

/// Componentwise 1 / x_i.
std::vector<double> gradient_log(std::span<const double> x);

/// sum_i weights_i * expected_goodput(alphas_i, slots_i).
double schedule_objective(const SchedulerInput& input, const ScheduleDecision& decision);

/// Greedy marginal-gain allocation, O(C log N). Equal marginal gains go to the
/// lowest client index.
ScheduleResult goodspeed_schedule(const SchedulerInput& input);

inline constexpr std::size_t kBruteForceMaxClients = 6;
inline constexpr std::uint32_t kBruteForceMaxCapacity = 16;

/// Exhaustive search over every allocation with sum <= C; ties go to the
/// lexicographically smallest slot vector. Throws SizeGuardError beyond
/// N = 6 or C = 16.
ScheduleResult brute_force_schedule(const SchedulerInput& input);

/// C / N slots each; the C mod N leftover slots go one each to clients 0, 1, ...
ScheduleDecision fixed_schedule(std::size_t num_clients, std::uint32_t capacity);

/// Uniformly random composition of C into N non-negative parts (stars and bars).
ScheduleDecision random_schedule(std::size_t num_clients, std::uint32_t capacity, RandomStream& rng);

}  // namespace fairspec
