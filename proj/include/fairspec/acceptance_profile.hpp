#pragma once

// Per-client acceptance-rate processes alpha_i(t) driving the simulator.

#include <cstdint>
#include <vector>

#include "fairspec/rng.hpp"
#include "fairspec/token_model.hpp"

namespace fairspec {

inline constexpr double kProfileAlphaLow = 0.05;
inline constexpr double kProfileAlphaHigh = 0.95;

struct PiecewiseSegment {
  std::uint64_t start = 0;  // first round at which `level` applies
  double level = 0.5;
};

struct RandomWalkSpec {
  double start = 0.5;
  double step = 0.05;
  double low = kProfileAlphaLow;
  double high = kProfileAlphaHigh;
};

/// Draft/target model pair for one client in token-model mode.
struct ModelPair {
  MarkovLM draft;
  MarkovLM target;
};

struct AcceptanceProfile {
  enum class Kind { kTokenModel, kStationary, kPiecewise, kRandomWalk };

  Kind kind = Kind::kStationary;
  std::vector<double> levels;                           // stationary
  std::vector<std::vector<PiecewiseSegment>> segments;  // piecewise, per client
  std::vector<RandomWalkSpec> walks;                    // random walk, per client
  std::vector<ModelPair> models;                        // token model, per client

  static AcceptanceProfile stationary(std::vector<double> levels);
  static AcceptanceProfile piecewise(std::vector<std::vector<PiecewiseSegment>> segments);
  static AcceptanceProfile random_walk(std::vector<RandomWalkSpec> walks);
  static AcceptanceProfile token_model(std::vector<ModelPair> models);

  std::size_t num_clients() const noexcept;

  /// Structural checks: levels in [0, 1], switch times strictly increasing and
  /// starting at 0, walk bounds inside [0.05, 0.95], matching vocabularies.
  /// Throws InvalidArgument.
  void validate() const;
};

/// Draft/target pair whose drafted token always has ratio p/q = alpha:
/// the draft is a point mass on token 0 and the target puts alpha there.
ModelPair constant_ratio_pair(std::size_t vocab_size, double alpha);

/// Random target, draft = (1 - agreement) * noise + agreement * target.
ModelPair synthetic_pair(std::size_t vocab_size, double agreement, double concentration,
                         RandomStream& rng);

/// Acceptance rate of a model pair in a given context.
double context_alpha(const ModelPair& pair, TokenId context);

/// Acceptance rate averaged over the target chain's stationary law.
double stationary_alpha(const ModelPair& pair);

/// alpha_i(t) with explicit random stream (random-walk kind consumes t steps
/// from `rng`; other kinds ignore it).
double alpha_at(const AcceptanceProfile& profile, std::size_t client, std::uint64_t t, RandomStream& rng);

/// Stateful evaluator used by the simulator. Random-walk paths are generated
/// once per client from a substream of `seed` and cached, so queries are O(1)
/// amortized and repeatable.
class AcceptanceProcess {
 public:
  AcceptanceProcess(const AcceptanceProfile& profile, std::uint64_t seed);

  const AcceptanceProfile& profile() const noexcept { return *profile_; }
  double alpha_at(std::size_t client, std::uint64_t t);

 private:
  const AcceptanceProfile* profile_;
  std::vector<RandomStream> walk_rngs_;
  std::vector<std::vector<double>> walk_paths_;
  std::vector<double> token_alphas_;
};

/// Long-run acceptance rates used to build the oracle's region: stationary
/// levels; piecewise time averages over rounds 1..horizon (final levels when
/// horizon is 0); the walk midpoint; the stationary-averaged token-model rate.
/// Results are clamped into [kAlphaMin, kAlphaMax].
std::vector<double> long_run_alphas(const AcceptanceProfile& profile, std::uint64_t horizon);

}  // namespace fairspec
