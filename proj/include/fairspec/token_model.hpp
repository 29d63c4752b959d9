#pragma once

// Speculative-decoding semantics over small synthetic token models: drafting,
// verification with residual resampling, and the exact acceptance rate and
// emitted-token law used as oracles.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fairspec/rng.hpp"

namespace fairspec {

using TokenId = std::uint32_t;

/// Probability vector over a finite vocabulary. Immutable once constructed.
class CategoricalDist {
 public:
  static constexpr double kSumTolerance = 1e-12;

  /// Validates `probs` (size >= 2, entries >= 0 and finite, sum 1 within
  /// kSumTolerance). Throws InvalidDistribution.
  explicit CategoricalDist(std::vector<double> probs);

  std::size_t size() const noexcept { return probs_.size(); }
  std::span<const double> probs() const noexcept { return probs_; }
  double operator[](TokenId s) const { return probs_.at(s); }

  friend bool operator==(const CategoricalDist&, const CategoricalDist&) = default;

 private:
  std::vector<double> probs_;
};

/// Rescale non-negative weights to a distribution. Throws InvalidDistribution
/// for negative, non-finite or all-zero weights, or fewer than two entries.
CategoricalDist normalize(std::span<const double> weights);

/// Inverse-CDF draw. The returned token always has positive probability.
TokenId sample(const CategoricalDist& dist, RandomStream& rng);

/// First-order Markov language model: next-token law conditioned on the previous token.
class MarkovLM {
 public:
  MarkovLM(CategoricalDist initial, std::vector<CategoricalDist> transition);

  /// Random model: every row drawn from a symmetric Dirichlet(concentration).
  static MarkovLM random(std::size_t vocab_size, double concentration, RandomStream& rng);

  /// Row-wise mixture (1 - w) * a + w * b. Both models must share a vocabulary.
  static MarkovLM mix(const MarkovLM& a, const MarkovLM& b, double w);

  std::size_t vocab_size() const noexcept { return initial_.size(); }
  const CategoricalDist& initial() const noexcept { return initial_; }
  const CategoricalDist& next(TokenId prev) const { return transition_.at(prev); }
  std::span<const CategoricalDist> rows() const noexcept { return transition_; }

  /// Stationary law of the token chain (power iteration, tolerance 1e-14).
  std::vector<double> stationary(std::size_t max_iters = 100000) const;

 private:
  CategoricalDist initial_;
  std::vector<CategoricalDist> transition_;
};

struct DraftResult {
  std::vector<TokenId> tokens;
  std::vector<CategoricalDist> q_dists;

  std::size_t size() const noexcept { return tokens.size(); }
};

struct VerifyOutcome {
  std::size_t accepted_count = 0;
  std::vector<TokenId> emitted_tokens;  // accepted prefix plus one extra token
  std::vector<double> accept_ratios;    // min(1, p_j / q_j) for every drafted position
};

/// Autoregressive draft of `num_tokens` tokens following `prefix_last_token`.
DraftResult draft_sequence(const MarkovLM& lm, TokenId prefix_last_token, std::size_t num_tokens,
                           RandomStream& rng);

/// Target distributions p_1..p_{S+1} along the drafted path: p_dists[0] conditions on
/// the prefix, p_dists[j] on draft.tokens[j-1].
std::vector<CategoricalDist> target_dists(const MarkovLM& target, TokenId prefix_last_token,
                                          const DraftResult& draft);

/// Verification with rejection sampling. Draws r_j on (0,1) for every drafted
/// position, accepts while r_j <= p_j(s_j)/q_j(s_j), and samples the extra token
/// from the residual law after a rejection or from p_{S+1} when all pass.
/// Throws InvalidArgument on length mismatch or a drafted token with q_j(s_j) = 0.
VerifyOutcome verify_speculative(std::span<const CategoricalDist> p_dists, const DraftResult& draft,
                                 RandomStream& rng);

/// Normalized positive part of p - q. Throws InvalidDistribution when p <= q everywhere.
CategoricalDist residual_distribution(const CategoricalDist& p, const CategoricalDist& q);

/// sum_s min(p(s), q(s)), the exact value of E_{s~q}[min(1, p(s)/q(s))].
double analytic_acceptance_rate(const CategoricalDist& p, const CategoricalDist& q);

/// Exact law of the first emitted token under single-step speculative sampling,
/// assembled from its accept and reject branches. Equals p by construction of
/// the algorithm; computed independently so tests comparing it to p are meaningful.
CategoricalDist emitted_token_oracle(const CategoricalDist& p, const CategoricalDist& q);

}  // namespace fairspec
