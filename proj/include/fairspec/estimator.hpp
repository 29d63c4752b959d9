#pragma once

#include <cstdint>
#include <optional>
#include <span>

namespace fairspec {

inline constexpr double kAlphaMin = 1e-4;
inline constexpr double kAlphaMax = 1.0 - 1e-4;
/// Lower bound on smoothed goodput; keeps the log-utility gradient 1/X finite.
inline constexpr double kGoodputFloor = 1e-6;

/// Step-size schedule for one smoothing recursion: either a constant in (0,1)
/// or scale / t^exponent with exponent in (0.5, 1].
struct StepSchedule {
  enum class Kind { kConstant, kDecay };

  Kind kind = Kind::kConstant;
  double value = 0.1;     // constant step, or the decay scale c
  double exponent = 1.0;  // decay only

  static StepSchedule constant(double v) { return {Kind::kConstant, v, 1.0}; }
  static StepSchedule decay(double scale, double exponent) { return {Kind::kDecay, scale, exponent}; }

  /// Throws InvalidArgument when the parameters are outside their ranges.
  void validate() const;
};

struct SmoothingParams {
  StepSchedule eta = StepSchedule::constant(0.1);  // acceptance-rate smoothing
  StepSchedule beta = StepSchedule::constant(0.5);  // goodput smoothing

  /// Validates both schedules and, when both decay, that eta decays strictly
  /// faster (so eta_t / beta_t -> 0).
  void validate() const;
};

enum class SmoothedQuantity { kEta, kBeta };

/// Step size at round t >= 1. Decay values are clamped into (0, 1).
double smoothing_value(const SmoothingParams& params, SmoothedQuantity which, std::uint64_t t);
double step_value(const StepSchedule& schedule, std::uint64_t t);

struct ClientEstimates {
  double alpha_hat = 0.5;
  double goodput_hat = 1.0;
};

/// Exponential smoothing of the acceptance rate with the round's accept ratios.
/// Returns std::nullopt when `ratios` is empty (a zero-slot round); callers carry
/// the previous estimate forward. The result is clamped to [kAlphaMin, kAlphaMax].
std::optional<double> update_acceptance(double prev, std::span<const double> ratios, double eta);

/// Exponential smoothing of realized goodput, floored at kGoodputFloor.
double update_goodput(double prev, double realized, double beta);

/// Expected tokens emitted for S drafted tokens at acceptance rate alpha:
/// (1 - alpha^{S+1}) / (1 - alpha). Throws InvalidArgument unless 0 < alpha < 1.
double expected_goodput(double alpha, std::uint64_t slots);

}  // namespace fairspec
