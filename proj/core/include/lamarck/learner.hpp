#pragma once

// Reversible Differential Evolution for lifetime learning of CPG weights.

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "lamarck/rng.hpp"

namespace lamarck::learner {

using WeightVector = std::vector<double>;

struct RevDeConfig {
  std::size_t mu = 10;
  std::size_t candidates_per_iter = 30;
  std::size_t iterations = 10;
  double F = 0.5;
  double CR = 0.9;
  double init_noise_sigma = 0.5;

  /// mu + candidates_per_iter * (iterations - 1)
  std::size_t budget() const noexcept {
    return iterations == 0 ? 0 : mu + candidates_per_iter * (iterations - 1);
  }
  /// Throws DomainError if mu < 3, iterations < 1, or F/CR/sigma out of range.
  void validate() const;

  bool operator==(const RevDeConfig&) const = default;
};

/// v1 = wi + F (wj - wk); v2 = wj + F (wk - v1); v3 = wk + F (v1 - v2)
std::array<WeightVector, 3> revde_mutate(std::span<const double> wi, std::span<const double> wj,
                                         std::span<const double> wk, double F);

/// Takes each coordinate from `candidate` with probability CR, else from `base`.
WeightVector uniform_crossover(std::span<const double> candidate, std::span<const double> base,
                               double CR, Rng& rng);

struct HistoryEntry {
  std::size_t index = 0;
  double reward = 0.0;

  bool operator==(const HistoryEntry&) const = default;
};

struct LearnResult {
  WeightVector best;
  double best_reward = 0.0;
  std::vector<HistoryEntry> history;  // one entry per assessment, in order
};

/// Reward oracle. A thrown exception counts as reward -inf.
using Assess = std::function<double(std::span<const double>)>;

/// Starts from the inherited vector plus mu - 1 Gaussian mutants; each
/// iteration turns random distinct triplets into candidates (reversible
/// mutation then crossover with the triplet member it perturbs) and keeps the
/// best mu of parents and candidates. Consumes exactly cfg.budget() calls.
LearnResult learn(std::span<const double> inherited, const Assess& assess, const RevDeConfig& cfg,
                  Rng& rng);

}  // namespace lamarck::learner
