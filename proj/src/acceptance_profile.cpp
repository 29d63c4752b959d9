#include "fairspec/acceptance_profile.hpp"

#include <algorithm>

#include "fairspec/error.hpp"
#include "fairspec/estimator.hpp"
#include "fairspec/kernels.hpp"

namespace fairspec {

namespace {

constexpr std::uint64_t kWalkStreamTag = 0x77616c6bULL;  // "walk"

double piecewise_level(const std::vector<PiecewiseSegment>& segs, std::uint64_t t) {
  // Switch times are inclusive of the new level.
  auto it = std::upper_bound(segs.begin(), segs.end(), t,
                             [](std::uint64_t v, const PiecewiseSegment& s) { return v < s.start; });
  return std::prev(it)->level;
}

double reflect(double v, double low, double high) {
  for (int guard = 0; guard < 64 && (v > high || v < low); ++guard) {
    if (v > high) v = 2.0 * high - v;
    if (v < low) v = 2.0 * low - v;
  }
  return std::clamp(v, low, high);
}

double walk_step(const RandomWalkSpec& w, double v, RandomStream& rng) {
  return reflect(v + (rng.bernoulli(0.5) ? w.step : -w.step), w.low, w.high);
}

}  // namespace

AcceptanceProfile AcceptanceProfile::stationary(std::vector<double> levels) {
  AcceptanceProfile p;
  p.kind = Kind::kStationary;
  p.levels = std::move(levels);
  return p;
}

AcceptanceProfile AcceptanceProfile::piecewise(std::vector<std::vector<PiecewiseSegment>> segments) {
  AcceptanceProfile p;
  p.kind = Kind::kPiecewise;
  p.segments = std::move(segments);
  return p;
}

AcceptanceProfile AcceptanceProfile::random_walk(std::vector<RandomWalkSpec> walks) {
  AcceptanceProfile p;
  p.kind = Kind::kRandomWalk;
  p.walks = std::move(walks);
  return p;
}

AcceptanceProfile AcceptanceProfile::token_model(std::vector<ModelPair> models) {
  AcceptanceProfile p;
  p.kind = Kind::kTokenModel;
  p.models = std::move(models);
  return p;
}

std::size_t AcceptanceProfile::num_clients() const noexcept {
  switch (kind) {
    case Kind::kStationary:
      return levels.size();
    case Kind::kPiecewise:
      return segments.size();
    case Kind::kRandomWalk:
      return walks.size();
    case Kind::kTokenModel:
      return models.size();
  }
  return 0;
}

void AcceptanceProfile::validate() const {
  if (num_clients() == 0) throw InvalidArgument("acceptance profile has no clients");
  auto check_level = [](double a) {
    if (!(a >= 0.0 && a <= 1.0)) throw InvalidArgument("acceptance level must lie in [0, 1]");
  };
  switch (kind) {
    case Kind::kStationary:
      std::for_each(levels.begin(), levels.end(), check_level);
      break;
    case Kind::kPiecewise:
      for (const auto& segs : segments) {
        if (segs.empty() || segs.front().start != 0)
          throw InvalidArgument("piecewise profile must start at round 0");
        for (std::size_t j = 0; j < segs.size(); ++j) {
          check_level(segs[j].level);
          if (j > 0 && segs[j].start <= segs[j - 1].start)
            throw InvalidArgument("piecewise switch times must be strictly increasing");
        }
      }
      break;
    case Kind::kRandomWalk:
      for (const auto& w : walks) {
        if (!(w.low >= kProfileAlphaLow && w.high <= kProfileAlphaHigh && w.low < w.high))
          throw InvalidArgument("random-walk bounds must satisfy 0.05 <= low < high <= 0.95");
        if (!(w.step > 0.0 && w.step < w.high - w.low))
          throw InvalidArgument("random-walk step must be positive and smaller than the range");
        if (!(w.start >= w.low && w.start <= w.high))
          throw InvalidArgument("random-walk start must lie inside its bounds");
      }
      break;
    case Kind::kTokenModel:
      for (const auto& m : models) {
        if (m.draft.vocab_size() != m.target.vocab_size())
          throw InvalidArgument("draft and target vocabularies differ");
      }
      break;
  }
}

ModelPair constant_ratio_pair(std::size_t vocab_size, double alpha) {
  if (vocab_size < 2) throw InvalidArgument("vocab_size must be at least 2");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
  std::vector<double> q(vocab_size, 0.0);
  q[0] = 1.0;
  std::vector<double> p(vocab_size, (1.0 - alpha) / static_cast<double>(vocab_size - 1));
  p[0] = alpha;
  const CategoricalDist draft_row = normalize(q);
  const CategoricalDist target_row = normalize(p);
  return {MarkovLM(draft_row, std::vector<CategoricalDist>(vocab_size, draft_row)),
          MarkovLM(target_row, std::vector<CategoricalDist>(vocab_size, target_row))};
}

ModelPair synthetic_pair(std::size_t vocab_size, double agreement, double concentration,
                         RandomStream& rng) {
  MarkovLM target = MarkovLM::random(vocab_size, concentration, rng);
  MarkovLM noise = MarkovLM::random(vocab_size, concentration, rng);
  MarkovLM draft = MarkovLM::mix(noise, target, agreement);
  return {std::move(draft), std::move(target)};
}

double context_alpha(const ModelPair& pair, TokenId context) {
  return analytic_acceptance_rate(pair.target.next(context), pair.draft.next(context));
}

double stationary_alpha(const ModelPair& pair) {
  const std::vector<double> pi = pair.target.stationary();
  std::vector<double> rates(pi.size());
  for (std::size_t c = 0; c < pi.size(); ++c) rates[c] = context_alpha(pair, static_cast<TokenId>(c));
  return kernels::dot(pi, rates);
}

double alpha_at(const AcceptanceProfile& profile, std::size_t client, std::uint64_t t, RandomStream& rng) {
  switch (profile.kind) {
    case AcceptanceProfile::Kind::kStationary:
      return profile.levels.at(client);
    case AcceptanceProfile::Kind::kPiecewise:
      return piecewise_level(profile.segments.at(client), t);
    case AcceptanceProfile::Kind::kRandomWalk: {
      const RandomWalkSpec& w = profile.walks.at(client);
      double v = w.start;
      for (std::uint64_t s = 0; s < t; ++s) v = walk_step(w, v, rng);
      return v;
    }
    case AcceptanceProfile::Kind::kTokenModel:
      return stationary_alpha(profile.models.at(client));
  }
  return 0.0;
}

AcceptanceProcess::AcceptanceProcess(const AcceptanceProfile& profile, std::uint64_t seed)
    : profile_(&profile) {
  profile.validate();
  const std::size_t n = profile.num_clients();
  if (profile.kind == AcceptanceProfile::Kind::kRandomWalk) {
    walk_rngs_.reserve(n);
    for (std::size_t i = 0; i < n; ++i) walk_rngs_.push_back(RandomStream::derive(seed, {kWalkStreamTag, i}));
    walk_paths_.resize(n);
    for (std::size_t i = 0; i < n; ++i) walk_paths_[i].push_back(profile.walks[i].start);
  } else if (profile.kind == AcceptanceProfile::Kind::kTokenModel) {
    for (const auto& m : profile.models) token_alphas_.push_back(stationary_alpha(m));
  }
}

double AcceptanceProcess::alpha_at(std::size_t client, std::uint64_t t) {
  switch (profile_->kind) {
    case AcceptanceProfile::Kind::kRandomWalk: {
      auto& path = walk_paths_.at(client);
      const RandomWalkSpec& w = profile_->walks[client];
      while (path.size() <= t) path.push_back(walk_step(w, path.back(), walk_rngs_[client]));
      return path[t];
    }
    case AcceptanceProfile::Kind::kTokenModel:
      return token_alphas_.at(client);
    default: {
      RandomStream unused(0);
      return fairspec::alpha_at(*profile_, client, t, unused);
    }
  }
}

std::vector<double> long_run_alphas(const AcceptanceProfile& profile, std::uint64_t horizon) {
  profile.validate();
  std::vector<double> out(profile.num_clients());
  for (std::size_t i = 0; i < out.size(); ++i) {
    switch (profile.kind) {
      case AcceptanceProfile::Kind::kStationary:
        out[i] = profile.levels[i];
        break;
      case AcceptanceProfile::Kind::kPiecewise: {
        const auto& segs = profile.segments[i];
        if (horizon == 0) {
          out[i] = segs.back().level;
          break;
        }
        double acc = 0.0;
        for (std::uint64_t t = 1; t <= horizon; ++t) acc += piecewise_level(segs, t);
        out[i] = acc / static_cast<double>(horizon);
        break;
      }
      case AcceptanceProfile::Kind::kRandomWalk:
        out[i] = 0.5 * (profile.walks[i].low + profile.walks[i].high);
        break;
      case AcceptanceProfile::Kind::kTokenModel:
        out[i] = stationary_alpha(profile.models[i]);
        break;
    }
    out[i] = std::clamp(out[i], kAlphaMin, kAlphaMax);
  }
  return out;
}

}  // namespace fairspec
