#include "lamarck/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lamarck/analysis.hpp"
#include "lamarck/errors.hpp"
#include "lamarck/parallel.hpp"

namespace lamarck::evolution {

namespace {

// Purpose tags for derived random streams.
enum StreamTag : std::uint64_t {
  kInitBody = 1,
  kInitBrain = 2,
  kInitLearn = 3,
  kSelect = 4,
  kReproduce = 5,
  kLearn = 6,
};

double mean_of(std::span<const double> v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

std::string_view mode_name(Mode mode) noexcept {
  return mode == Mode::Lamarckian ? "lamarckian" : "darwinian";
}

Mode mode_from(std::string_view name) {
  if (name == "lamarckian") return Mode::Lamarckian;
  if (name == "darwinian") return Mode::Darwinian;
  throw DomainError("mode must be 'lamarckian' or 'darwinian', got '" + std::string(name) + "'");
}

void EvolutionConfig::validate() const {
  if (mu < 1) throw DomainError("population size must be at least 1");
  if (lambda < 1 || lambda > mu) throw DomainError("offspring size must be in [1, population size]");
  if (tournament_size < 2) throw DomainError("tournament size must be at least 2");
  if (max_modules < 1 || max_modules > morphology::kMaxModules)
    throw DomainError("max_modules must be in [1, 10]");
  if (!(body_crossover >= 0.0 && body_crossover <= 1.0))
    throw DomainError("body crossover probability must be in [0, 1]");
  if (!(brain_mutation.probability >= 0.0 && brain_mutation.probability <= 1.0))
    throw DomainError("brain mutation probability must be in [0, 1]");
  if (parallelism < 1) throw DomainError("parallelism must be at least 1");
  if (learning) revde.validate();
  if (task.duration <= 0.0 || task.reach_radius <= 0.0)
    throw DomainError("task duration and reach radius must be positive");
  if (surrogate.dt <= 0.0) throw DomainError("control step must be positive");
  if (!(surrogate.c_steer >= 0.0 && surrogate.c_steer <= 1.0))
    throw DomainError("steering strength must be in [0, 1]");
}

const Individual& fitter(const Individual& a, const Individual& b) noexcept {
  return b.fitness_after > a.fitness_after ? b : a;
}

std::size_t tournament(std::span<const Individual> population, std::size_t size, Rng& rng) {
  if (population.empty()) throw DomainError("tournament on an empty population");
  std::vector<std::size_t> best;
  for (std::size_t d = 0; d < size; ++d) {
    const std::size_t pick = uniform_index(rng, population.size());
    if (best.empty() || population[pick].fitness_after > population[best.front()].fitness_after) {
      best.assign(1, pick);
    } else if (population[pick].fitness_after == population[best.front()].fitness_after) {
      best.push_back(pick);
    }
  }
  return best.size() == 1 ? best.front() : best[uniform_index(rng, best.size())];
}

std::pair<std::size_t, std::size_t> select_parents(std::span<const Individual> population,
                                                   std::size_t tournament_size, Rng& rng) {
  const std::size_t a = tournament(population, tournament_size, rng);
  const std::size_t b = tournament(population, tournament_size, rng);
  return {a, b};
}

namespace {

void develop_and_score(Individual& ind, const EvolutionConfig& cfg) {
  ind.tree = morphology::develop(ind.body, cfg.max_modules);
  ind.fitness_before = simulation::evaluate(ind.tree, ind.brain, cfg.task, cfg.surrogate);
}

}  // namespace

Individual reproduce(const Individual& a, const Individual& b, Rng& rng,
                     const EvolutionConfig& cfg) {
  const Individual& donor = fitter(a, b);
  Individual child;
  child.parents = {a.id, b.id};

  if (cfg.freeze_bodies) {
    child.body = donor.body;
  } else {
    const cppn::Parent which = &donor == &a ? cppn::Parent::A : cppn::Parent::B;
    cppn::Genome base = bernoulli(rng, cfg.body_crossover)
                            ? cppn::crossover(a.body, b.body, which, rng)
                            : donor.body;
    child.body = cppn::mutate(base, rng, cfg.body_mutation);
  }
  child.brain = brain::mutate_brain(donor.brain, rng, cfg.brain_mutation);
  develop_and_score(child, cfg);
  return child;
}

Individual random_individual(Rng& rng, const EvolutionConfig& cfg) {
  Individual ind;
  ind.body = cppn::Genome::random_minimal(rng);
  ind.brain = brain::Genotype::random(rng);
  develop_and_score(ind, cfg);
  return ind;
}

void learn_and_evaluate(Individual& ind, Rng& rng, const EvolutionConfig& cfg) {
  const simulation::Evaluator evaluator(ind.tree, cfg.task, cfg.surrogate);
  const learner::WeightVector inherited = evaluator.weights_of(ind.brain);
  if (!cfg.learning) {
    ind.learned = inherited;
    ind.history.clear();
    ind.fitness_after = ind.fitness_before;
    return;
  }
  learner::LearnResult result = learner::learn(
      inherited, [&](std::span<const double> w) { return evaluator(w); }, cfg.revde, rng);
  ind.learned = std::move(result.best);
  ind.history = std::move(result.history);
  ind.fitness_after = evaluator(ind.learned);
  if (cfg.mode == Mode::Lamarckian) ind.brain = brain::writeback(ind.brain, ind.tree, ind.learned);
}

std::vector<Individual> select_survivors(std::vector<Individual> parents,
                                         std::vector<Individual> newborns, std::size_t mu) {
  std::vector<Individual> pool = std::move(parents);
  pool.reserve(pool.size() + newborns.size());
  std::move(newborns.begin(), newborns.end(), std::back_inserter(pool));
  std::stable_sort(pool.begin(), pool.end(), [](const Individual& x, const Individual& y) {
    return x.fitness_after > y.fitness_after;
  });
  if (pool.size() > mu) pool.resize(mu);
  return pool;
}

GenerationStats compute_stats(std::size_t generation, std::span<const Individual> population,
                              std::span<const Individual> newborns,
                              std::span<const std::optional<double>> parent_distances) {
  GenerationStats s;
  s.generation = generation;
  std::vector<double> fit, delta, before;
  std::vector<morphology::ModuleTree> trees;
  for (const auto& ind : population) {
    fit.push_back(ind.fitness_after);
    trees.push_back(ind.tree);
  }
  for (const auto& ind : newborns) {
    delta.push_back(analysis::learning_delta(ind));
    before.push_back(ind.fitness_before);
  }
  s.mean_fitness = mean_of(fit);
  s.max_fitness = fit.empty() ? 0.0 : *std::max_element(fit.begin(), fit.end());
  s.diversity = trees.size() < 2 ? 0.0 : analysis::diversity(std::span<const morphology::ModuleTree>(trees));
  s.mean_learning_delta = mean_of(delta);
  s.mean_fitness_before = mean_of(before);
  std::vector<double> dist;
  for (const auto& d : parent_distances)
    if (d) dist.push_back(*d);
  if (!dist.empty()) s.mean_parent_distance = mean_of(dist);
  return s;
}

GenerationReport initialize(const EvolutionConfig& cfg, std::vector<Individual>& population) {
  cfg.validate();
  population.assign(cfg.mu, Individual{});
  parallel_for(cfg.mu, cfg.parallelism, [&](std::size_t i) {
    Individual ind;
    Rng body_rng = make_stream(cfg.seed, {kInitBody, i});
    Rng brain_rng = make_stream(cfg.seed, {kInitBrain, i});
    ind.body = cppn::Genome::random_minimal(body_rng);
    ind.brain = brain::Genotype::random(brain_rng);
    develop_and_score(ind, cfg);
    ind.id = i;
    ind.generation_born = 0;
    Rng learn_rng = make_stream(cfg.seed, {kInitLearn, i});
    learn_and_evaluate(ind, learn_rng, cfg);
    population[i] = std::move(ind);
  });

  GenerationReport report;
  report.generation = 0;
  report.newborns = population;
  for (const auto& ind : population) report.population.push_back(ind.id);
  std::vector<std::optional<double>> none(population.size());
  report.stats = compute_stats(0, population, population, none);
  return report;
}

GenerationReport run_generation(std::vector<Individual>& population, std::size_t generation,
                                const EvolutionConfig& cfg) {
  if (generation < 1) throw DomainError("run_generation starts at generation 1");
  if (population.size() != cfg.mu)
    throw IntegrityError("population holds " + std::to_string(population.size()) +
                         " individuals, expected " + std::to_string(cfg.mu));

  Rng select_rng = make_stream(cfg.seed, {kSelect, generation});
  std::vector<std::pair<std::size_t, std::size_t>> parents;
  parents.reserve(cfg.lambda);
  for (std::size_t k = 0; k < cfg.lambda; ++k)
    parents.push_back(select_parents(population, cfg.tournament_size, select_rng));

  const IndividualId first_id = cfg.mu + (generation - 1) * cfg.lambda;
  std::vector<Individual> newborns(cfg.lambda);
  std::vector<std::optional<double>> distances(cfg.lambda);
  parallel_for(cfg.lambda, cfg.parallelism, [&](std::size_t k) {
    const Individual& a = population[parents[k].first];
    const Individual& b = population[parents[k].second];
    Rng rep_rng = make_stream(cfg.seed, {kReproduce, generation, k});
    Individual child = reproduce(a, b, rep_rng, cfg);
    child.id = first_id + k;
    child.generation_born = generation;
    Rng learn_rng = make_stream(cfg.seed, {kLearn, generation, k});
    learn_and_evaluate(child, learn_rng, cfg);
    distances[k] = static_cast<double>(
        analysis::tree_edit_distance(child.tree, fitter(a, b).tree));
    newborns[k] = std::move(child);
  });

  GenerationReport report;
  report.generation = generation;
  report.newborns = newborns;
  population = select_survivors(std::move(population), std::move(newborns), cfg.mu);
  for (const auto& ind : population) report.population.push_back(ind.id);
  report.stats = compute_stats(generation, population, report.newborns, distances);
  return report;
}

std::vector<Individual> run_experiment(const EvolutionConfig& cfg, const ReportSink& sink,
                                       std::optional<ResumePoint> resume) {
  cfg.validate();
  std::vector<Individual> population;
  std::size_t start = 1;
  if (resume) {
    population = std::move(resume->population);
    start = resume->generation + 1;
  } else {
    GenerationReport init = initialize(cfg, population);
    if (sink) sink(init);
  }
  for (std::size_t g = start; g <= cfg.generations; ++g) {
    GenerationReport report = run_generation(population, g, cfg);
    if (sink) sink(report);
  }
  return population;
}

}  // namespace lamarck::evolution
