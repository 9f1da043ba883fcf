#pragma once

// Outer (mu + lambda) loop: bodies recombine sexually, brains are inherited
// asexually from the better parent, every newborn learns, and in Lamarckian
// mode the learned weights are written back into its brain genotype.

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "lamarck/brain.hpp"
#include "lamarck/cppn.hpp"
#include "lamarck/learner.hpp"
#include "lamarck/morphology.hpp"
#include "lamarck/simulation.hpp"

namespace lamarck::evolution {

enum class Mode : std::uint8_t { Lamarckian, Darwinian };

std::string_view mode_name(Mode mode) noexcept;
/// Accepts "lamarckian" / "darwinian"; throws DomainError otherwise.
Mode mode_from(std::string_view name);

using IndividualId = std::uint64_t;

struct Individual {
  IndividualId id = 0;
  std::vector<IndividualId> parents;  // [a, b] as selected; empty for generation 0
  cppn::Genome body;
  brain::Genotype brain;
  morphology::ModuleTree tree;
  double fitness_before = 0.0;
  double fitness_after = 0.0;  // selection fitness
  learner::WeightVector learned;
  std::vector<learner::HistoryEntry> history;
  std::size_t generation_born = 0;

  bool operator==(const Individual&) const = default;
};

struct EvolutionConfig {
  std::size_t mu = 50;
  std::size_t lambda = 25;
  std::size_t generations = 30;
  std::size_t tournament_size = 2;
  Mode mode = Mode::Lamarckian;
  std::uint64_t seed = 0;

  double body_crossover = 0.8;
  cppn::MutationRates body_mutation;
  brain::MutationParams brain_mutation;
  std::size_t max_modules = morphology::kMaxModules;

  bool learning = true;
  /// Offspring copy the brain donor's body unchanged (fixed-body control).
  bool freeze_bodies = false;

  learner::RevDeConfig revde;
  simulation::TaskSpec task;
  simulation::SurrogateParams surrogate;

  std::size_t parallelism = 1;

  /// Throws DomainError on an inconsistent configuration.
  void validate() const;

  bool operator==(const EvolutionConfig&) const = default;
};

/// Fitter of two parents by fitness_after; ties go to `a`.
const Individual& fitter(const Individual& a, const Individual& b) noexcept;

/// One k-tournament with replacement; ties among the best draws are broken
/// uniformly. Returns an index into `population`.
std::size_t tournament(std::span<const Individual> population, std::size_t size, Rng& rng);

/// Two independent tournaments.
std::pair<std::size_t, std::size_t> select_parents(std::span<const Individual> population,
                                                   std::size_t tournament_size, Rng& rng);

/// Builds a newborn (before learning): body from crossover with probability
/// cfg.body_crossover (else the fitter parent's body) then mutation; brain is
/// the fitter parent's genotype, mutated. fitness_before is evaluated.
Individual reproduce(const Individual& a, const Individual& b, Rng& rng,
                     const EvolutionConfig& cfg);

/// Random body and brain, developed and evaluated (before learning).
Individual random_individual(Rng& rng, const EvolutionConfig& cfg);

/// Lifetime learning, evaluation with the learned brain and, in Lamarckian
/// mode, writeback of the learned weights into the brain genotype.
void learn_and_evaluate(Individual& ind, Rng& rng, const EvolutionConfig& cfg);

struct GenerationStats {
  std::size_t generation = 0;
  double mean_fitness = 0.0;
  double max_fitness = 0.0;
  double diversity = 0.0;
  double mean_learning_delta = 0.0;  // over this generation's newborns
  double mean_fitness_before = 0.0;  // over this generation's newborns
  std::optional<double> mean_parent_distance;  // none for generation 0

  bool operator==(const GenerationStats&) const = default;
};

struct GenerationReport {
  std::size_t generation = 0;
  std::vector<Individual> newborns;  // initial population for generation 0
  std::vector<IndividualId> population;  // survivors, best first (gen 0: as created)
  GenerationStats stats;

  bool operator==(const GenerationReport&) const = default;
};

/// Survivors: best mu of parents followed by newborns, stable by fitness_after.
std::vector<Individual> select_survivors(std::vector<Individual> parents,
                                         std::vector<Individual> newborns, std::size_t mu);

/// Creates cfg.lambda newborns for generation `generation` (>= 1), learns
/// them and returns the report with the surviving population in `population`.
GenerationReport run_generation(std::vector<Individual>& population, std::size_t generation,
                                const EvolutionConfig& cfg);

/// Initial population (generation 0), learned and evaluated.
GenerationReport initialize(const EvolutionConfig& cfg, std::vector<Individual>& population);

/// Starting point for a continued run: the population after `generation`.
struct ResumePoint {
  std::size_t generation = 0;
  std::vector<Individual> population;
};

using ReportSink = std::function<void(const GenerationReport&)>;

/// Full run. Every random stream derives from (seed, purpose, generation,
/// slot), so results depend neither on parallelism nor on resumption.
std::vector<Individual> run_experiment(const EvolutionConfig& cfg, const ReportSink& sink,
                                       std::optional<ResumePoint> resume = std::nullopt);

GenerationStats compute_stats(std::size_t generation, std::span<const Individual> population,
                              std::span<const Individual> newborns,
                              std::span<const std::optional<double>> parent_distances);

}  // namespace lamarck::evolution
