#include "lamarck/learner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "lamarck/errors.hpp"

namespace lamarck::learner {

void RevDeConfig::validate() const {
  if (mu < 3) throw DomainError("RevDE population must hold at least 3 vectors");
  if (iterations < 1) throw DomainError("RevDE needs at least one iteration");
  if (!(F >= 0.0) || !std::isfinite(F)) throw DomainError("RevDE scaling factor must be >= 0");
  if (!(CR >= 0.0 && CR <= 1.0)) throw DomainError("RevDE crossover probability must be in [0,1]");
  if (!(init_noise_sigma >= 0.0)) throw DomainError("RevDE init noise must be >= 0");
}

std::array<WeightVector, 3> revde_mutate(std::span<const double> wi, std::span<const double> wj,
                                         std::span<const double> wk, double F) {
  if (wi.size() != wj.size() || wi.size() != wk.size())
    throw DomainError("revde_mutate: triplet dimensions differ");
  const std::size_t n = wi.size();
  WeightVector v1(n), v2(n), v3(n);
  for (std::size_t d = 0; d < n; ++d) {
    v1[d] = wi[d] + F * (wj[d] - wk[d]);
    v2[d] = wj[d] + F * (wk[d] - v1[d]);
    v3[d] = wk[d] + F * (v1[d] - v2[d]);
  }
  return {std::move(v1), std::move(v2), std::move(v3)};
}

WeightVector uniform_crossover(std::span<const double> candidate, std::span<const double> base,
                               double CR, Rng& rng) {
  if (candidate.size() != base.size()) throw DomainError("uniform_crossover: dimensions differ");
  WeightVector out(base.begin(), base.end());
  for (std::size_t d = 0; d < out.size(); ++d)
    if (bernoulli(rng, CR)) out[d] = candidate[d];
  return out;
}

namespace {

double safe_assess(const Assess& assess, std::span<const double> w) {
  try {
    double r = assess(w);
    return std::isnan(r) ? -std::numeric_limits<double>::infinity() : r;
  } catch (...) {
    return -std::numeric_limits<double>::infinity();
  }
}

}  // namespace

LearnResult learn(std::span<const double> inherited, const Assess& assess, const RevDeConfig& cfg,
                  Rng& rng) {
  cfg.validate();
  LearnResult result;
  result.history.reserve(cfg.budget());

  std::vector<WeightVector> pop;
  pop.reserve(cfg.mu);
  pop.emplace_back(inherited.begin(), inherited.end());
  std::normal_distribution<double> noise(0.0, cfg.init_noise_sigma);
  for (std::size_t m = 1; m < cfg.mu; ++m) {
    WeightVector w(inherited.begin(), inherited.end());
    if (cfg.init_noise_sigma > 0.0)
      for (double& v : w) v += noise(rng);
    pop.push_back(std::move(w));
  }

  auto record = [&](std::span<const double> w) {
    const double r = safe_assess(assess, w);
    result.history.push_back({result.history.size(), r});
    return r;
  };

  std::vector<double> reward;
  reward.reserve(cfg.mu);
  for (const auto& w : pop) reward.push_back(record(w));

  for (std::size_t it = 1; it < cfg.iterations; ++it) {
    // All random draws for the iteration happen before any assessment.
    std::vector<WeightVector> candidates;
    candidates.reserve(cfg.candidates_per_iter + 2);
    std::vector<std::size_t> idx(pop.size());
    while (candidates.size() < cfg.candidates_per_iter) {
      std::iota(idx.begin(), idx.end(), std::size_t{0});
      for (std::size_t s = 0; s < 3; ++s)
        std::swap(idx[s], idx[s + uniform_index(rng, idx.size() - s)]);
      auto v = revde_mutate(pop[idx[0]], pop[idx[1]], pop[idx[2]], cfg.F);
      for (std::size_t s = 0; s < 3 && candidates.size() < cfg.candidates_per_iter; ++s)
        candidates.push_back(uniform_crossover(v[s], pop[idx[s]], cfg.CR, rng));
    }

    std::vector<double> cand_reward;
    cand_reward.reserve(candidates.size());
    for (const auto& c : candidates) cand_reward.push_back(record(c));

    // Elitist truncation over parents and candidates; stable so earlier
    // members win ties.
    std::vector<std::size_t> order(pop.size() + candidates.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto score = [&](std::size_t i) {
      return i < pop.size() ? reward[i] : cand_reward[i - pop.size()];
    };
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return score(a) > score(b); });
    std::vector<WeightVector> next;
    std::vector<double> next_reward;
    for (std::size_t r = 0; r < cfg.mu; ++r) {
      const std::size_t i = order[r];
      next.push_back(i < pop.size() ? pop[i] : candidates[i - pop.size()]);
      next_reward.push_back(score(i));
    }
    pop = std::move(next);
    reward = std::move(next_reward);
  }

  const auto best = static_cast<std::size_t>(
      std::max_element(reward.begin(), reward.end()) - reward.begin());
  result.best = pop[best];
  result.best_reward = reward[best];
  return result;
}

}  // namespace lamarck::learner
