#include "fairspec/estimator.hpp"

#include <algorithm>
#include <cmath>

#include "fairspec/error.hpp"
#include "fairspec/kernels.hpp"

namespace fairspec {

void StepSchedule::validate() const {
  switch (kind) {
    case Kind::kConstant:
      if (!(value > 0.0 && value < 1.0)) throw InvalidArgument("constant step must lie in (0, 1)");
      return;
    case Kind::kDecay:
      if (!(value > 0.0) || !std::isfinite(value)) throw InvalidArgument("decay scale must be positive");
      if (!(exponent > 0.5 && exponent <= 1.0))
        throw InvalidArgument("decay exponent must lie in (0.5, 1]");
      return;
  }
}

void SmoothingParams::validate() const {
  eta.validate();
  beta.validate();
  if (eta.kind == StepSchedule::Kind::kDecay && beta.kind == StepSchedule::Kind::kDecay &&
      !(eta.exponent > beta.exponent))
    throw InvalidArgument("eta must decay faster than beta");
}

double step_value(const StepSchedule& schedule, std::uint64_t t) {
  if (t == 0) throw InvalidArgument("round index starts at 1");
  if (schedule.kind == StepSchedule::Kind::kConstant) return schedule.value;
  const double v = schedule.value / std::pow(static_cast<double>(t), schedule.exponent);
  return std::clamp(v, 1e-12, 1.0 - 1e-12);
}

double smoothing_value(const SmoothingParams& params, SmoothedQuantity which, std::uint64_t t) {
  return step_value(which == SmoothedQuantity::kEta ? params.eta : params.beta, t);
}

std::optional<double> update_acceptance(double prev, std::span<const double> ratios, double eta) {
  if (ratios.empty()) return std::nullopt;
  if (!(eta > 0.0 && eta < 1.0)) throw InvalidArgument("eta must lie in (0, 1)");
  const double mean = kernels::sum(ratios) / static_cast<double>(ratios.size());
  return std::clamp((1.0 - eta) * prev + eta * mean, kAlphaMin, kAlphaMax);
}

double update_goodput(double prev, double realized, double beta) {
  if (!(realized >= 0.0)) throw InvalidArgument("realized goodput must be non-negative");
  if (!(beta > 0.0 && beta < 1.0)) throw InvalidArgument("beta must lie in (0, 1)");
  return std::max((1.0 - beta) * prev + beta * realized, kGoodputFloor);
}

double expected_goodput(double alpha, std::uint64_t slots) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
  // Horner form of sum_{j=0}^{S} alpha^j; avoids cancellation in 1 - alpha^{S+1}
  // when alpha is close to 1.
  double acc = 1.0;
  for (std::uint64_t j = 0; j < slots; ++j) acc = 1.0 + alpha * acc;
  return acc;
}

}  // namespace fairspec
