#include "fairspec/token_model.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "fairspec/error.hpp"
#include "fairspec/kernels.hpp"

namespace fairspec {

CategoricalDist::CategoricalDist(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.size() < 2) throw InvalidDistribution("distribution needs at least two tokens");
  for (double v : probs_) {
    if (!std::isfinite(v) || v < 0.0)
      throw InvalidDistribution("probabilities must be finite and non-negative");
  }
  const double total = kernels::sum(probs_);
  if (std::abs(total - 1.0) > kSumTolerance)
    throw InvalidDistribution("probabilities sum to " + std::to_string(total) + ", not 1");
}

CategoricalDist normalize(std::span<const double> weights) {
  if (weights.size() < 2) throw InvalidDistribution("distribution needs at least two tokens");
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0)
      throw InvalidDistribution("weights must be finite and non-negative");
  }
  const double total = kernels::sum(weights);
  if (!(total > 0.0)) throw InvalidDistribution("all weights are zero");
  std::vector<double> out(weights.size());
  kernels::scale(weights, 1.0 / total, out);
  // One correction pass: 1/total can leave the sum a few ulps away from 1.
  const double again = kernels::sum(out);
  if (again != 1.0) kernels::scale(out, 1.0 / again, out);
  return CategoricalDist(std::move(out));
}

TokenId sample(const CategoricalDist& dist, RandomStream& rng) {
  const auto probs = dist.probs();
  const double u = rng.uniform_open();
  double cumulative = 0.0;
  TokenId last_positive = 0;
  for (std::size_t s = 0; s < probs.size(); ++s) {
    if (probs[s] <= 0.0) continue;
    last_positive = static_cast<TokenId>(s);
    cumulative += probs[s];
    if (u < cumulative) return last_positive;
  }
  // u landed in the rounding slack above the cumulative sum.
  return last_positive;
}

MarkovLM::MarkovLM(CategoricalDist initial, std::vector<CategoricalDist> transition)
    : initial_(std::move(initial)), transition_(std::move(transition)) {
  if (transition_.size() != initial_.size())
    throw InvalidDistribution("transition table needs one row per token");
  for (const auto& row : transition_) {
    if (row.size() != initial_.size()) throw InvalidDistribution("inconsistent vocabulary size");
  }
}

MarkovLM MarkovLM::random(std::size_t vocab_size, double concentration, RandomStream& rng) {
  if (vocab_size < 2) throw InvalidArgument("vocab_size must be at least 2");
  if (!(concentration > 0.0)) throw InvalidArgument("concentration must be positive");
  std::gamma_distribution<double> gamma(concentration, 1.0);
  auto draw_row = [&] {
    std::vector<double> w(vocab_size);
    // Floor keeps every token reachable so rows stay strictly positive.
    for (double& v : w) v = gamma(rng.engine()) + 1e-9;
    return normalize(w);
  };
  CategoricalDist initial = draw_row();
  std::vector<CategoricalDist> rows;
  rows.reserve(vocab_size);
  for (std::size_t s = 0; s < vocab_size; ++s) rows.push_back(draw_row());
  return MarkovLM(std::move(initial), std::move(rows));
}

MarkovLM MarkovLM::mix(const MarkovLM& a, const MarkovLM& b, double w) {
  if (a.vocab_size() != b.vocab_size()) throw InvalidArgument("vocabulary sizes differ");
  if (!(w >= 0.0 && w <= 1.0)) throw InvalidArgument("mixture weight must be in [0, 1]");
  auto blend = [w](const CategoricalDist& x, const CategoricalDist& y) {
    std::vector<double> out(x.probs().begin(), x.probs().end());
    kernels::lerp(out, y.probs(), w);
    return normalize(out);
  };
  std::vector<CategoricalDist> rows;
  rows.reserve(a.vocab_size());
  for (std::size_t s = 0; s < a.vocab_size(); ++s) rows.push_back(blend(a.rows()[s], b.rows()[s]));
  return MarkovLM(blend(a.initial(), b.initial()), std::move(rows));
}

std::vector<double> MarkovLM::stationary(std::size_t max_iters) const {
  const std::size_t v = vocab_size();
  std::vector<double> pi(v, 1.0 / static_cast<double>(v));
  std::vector<double> next(v);
  for (std::size_t it = 0; it < max_iters; ++it) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t s = 0; s < v; ++s) kernels::axpy(pi[s], transition_[s].probs(), next);
    // Lazy chain (I + P) / 2 has the same stationary law and cannot oscillate.
    double diff = 0.0;
    for (std::size_t s = 0; s < v; ++s) {
      next[s] = 0.5 * (next[s] + pi[s]);
      diff = std::max(diff, std::abs(next[s] - pi[s]));
    }
    pi.swap(next);
    if (diff < 1e-15) break;
  }
  const double total = kernels::sum(pi);
  kernels::scale(pi, 1.0 / total, pi);
  return pi;
}

DraftResult draft_sequence(const MarkovLM& lm, TokenId prefix_last_token, std::size_t num_tokens,
                           RandomStream& rng) {
  DraftResult out;
  out.tokens.reserve(num_tokens);
  out.q_dists.reserve(num_tokens);
  TokenId context = prefix_last_token;
  for (std::size_t j = 0; j < num_tokens; ++j) {
    const CategoricalDist& q = lm.next(context);
    context = sample(q, rng);
    out.tokens.push_back(context);
    out.q_dists.push_back(q);
  }
  return out;
}

std::vector<CategoricalDist> target_dists(const MarkovLM& target, TokenId prefix_last_token,
                                          const DraftResult& draft) {
  std::vector<CategoricalDist> p;
  p.reserve(draft.size() + 1);
  p.push_back(target.next(prefix_last_token));
  for (TokenId s : draft.tokens) p.push_back(target.next(s));
  return p;
}

VerifyOutcome verify_speculative(std::span<const CategoricalDist> p_dists, const DraftResult& draft,
                                 RandomStream& rng) {
  const std::size_t n = draft.size();
  if (draft.q_dists.size() != n) throw InvalidArgument("draft tokens and q_dists differ in length");
  if (p_dists.size() != n + 1) throw InvalidArgument("p_dists must have draft length + 1 entries");

  VerifyOutcome out;
  out.accept_ratios.reserve(n);
  out.accepted_count = n;
  bool rejected = false;
  for (std::size_t j = 0; j < n; ++j) {
    const TokenId s = draft.tokens[j];
    const double q = draft.q_dists[j][s];
    if (!(q > 0.0)) throw InvalidArgument("drafted token has zero draft probability");
    const double ratio = std::min(1.0, p_dists[j][s] / q);
    out.accept_ratios.push_back(ratio);
    // r_j is drawn at every position so the stream advances identically
    // whatever the outcome.
    const double r = rng.uniform_open();
    if (!rejected && r > ratio) {
      rejected = true;
      out.accepted_count = j;
    }
  }

  const std::size_t m = out.accepted_count;
  out.emitted_tokens.assign(draft.tokens.begin(), draft.tokens.begin() + static_cast<long>(m));
  if (m < n) {
    out.emitted_tokens.push_back(sample(residual_distribution(p_dists[m], draft.q_dists[m]), rng));
  } else {
    out.emitted_tokens.push_back(sample(p_dists[n], rng));
  }
  return out;
}

CategoricalDist residual_distribution(const CategoricalDist& p, const CategoricalDist& q) {
  if (p.size() != q.size()) throw InvalidDistribution("vocabulary sizes differ");
  std::vector<double> gap(p.size());
  const double total = kernels::positive_diff(p.probs(), q.probs(), gap);
  if (!(total > 0.0)) throw InvalidDistribution("residual distribution is all zero (p == q)");
  return normalize(gap);
}

double analytic_acceptance_rate(const CategoricalDist& p, const CategoricalDist& q) {
  if (p.size() != q.size()) throw InvalidDistribution("vocabulary sizes differ");
  return std::clamp(kernels::min_sum(p.probs(), q.probs()), 0.0, 1.0);
}

CategoricalDist emitted_token_oracle(const CategoricalDist& p, const CategoricalDist& q) {
  if (p.size() != q.size()) throw InvalidDistribution("vocabulary sizes differ");
  std::vector<double> gap(p.size());
  const double gap_mass = kernels::positive_diff(p.probs(), q.probs(), gap);
  std::vector<double> law(p.size());
  if (gap_mass > 0.0) {
    // Accept branch: q(s) * min(1, p(s)/q(s)) = min(p(s), q(s)).
    // Reject branch: (1 - alpha) * residual(s), with residual = gap / gap_mass.
    const double reject_mass = 1.0 - kernels::min_sum(p.probs(), q.probs());
    kernels::min_plus_scaled(p.probs(), q.probs(), gap, reject_mass / gap_mass, law);
  } else {
    std::vector<double> zero(p.size(), 0.0);
    kernels::min_plus_scaled(p.probs(), q.probs(), zero, 0.0, law);
  }
  return CategoricalDist(std::move(law));
}

}  // namespace fairspec
