#include <doctest.h>

#include <algorithm>
#include <map>

#include "fixtures.hpp"
#include "lamarck/errors.hpp"
#include "lamarck/evolution.hpp"
#include "lamarck/simulation.hpp"

using namespace lamarck;
using namespace lamarck::evolution;

namespace {

std::vector<Individual> scored(std::initializer_list<double> fitness) {
  std::vector<Individual> pop;
  IndividualId id = 0;
  for (double f : fitness) {
    Individual ind;
    ind.id = id++;
    ind.fitness_after = f;
    pop.push_back(ind);
  }
  return pop;
}

std::vector<GenerationReport> run_collect(const EvolutionConfig& cfg,
                                          std::vector<Individual>* final_pop = nullptr) {
  std::vector<GenerationReport> reports;
  auto pop = run_experiment(cfg, [&](const GenerationReport& r) { reports.push_back(r); });
  if (final_pop) *final_pop = std::move(pop);
  return reports;
}

}  // namespace

TEST_CASE("fitter breaks ties towards the first parent") {
  const auto pop = scored({1.0, 1.0, 2.0});
  CHECK(&fitter(pop[0], pop[1]) == &pop[0]);
  CHECK(&fitter(pop[1], pop[0]) == &pop[1]);
  CHECK(&fitter(pop[0], pop[2]) == &pop[2]);
}

TEST_CASE("binary tournament selection probabilities") {
  Rng rng(1);
  const auto pop = scored({0.0, 1.0});
  int wins = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) wins += tournament(pop, 2, rng) == 1;
  CHECK(wins / double(n) == doctest::Approx(0.75).epsilon(0.01));

  const auto tied = scored({1.0, 1.0});
  int first = 0;
  for (int i = 0; i < n; ++i) first += tournament(tied, 2, rng) == 0;
  CHECK(first / double(n) == doctest::Approx(0.5).epsilon(0.02));

  const auto single = scored({3.0});
  CHECK(tournament(single, 2, rng) == 0);
  CHECK_THROWS_AS(tournament(std::vector<Individual>{}, 2, rng), DomainError);
}

TEST_CASE("survivor selection is elitist") {
  auto parents = scored({5.0, 1.0});
  auto kids = scored({3.0});
  kids[0].id = 9;
  const auto next = select_survivors(parents, kids, 2);
  REQUIRE(next.size() == 2);
  CHECK(next[0].id == 0);
  CHECK(next[1].id == 9);

  auto worse = scored({0.5});
  const auto kept = select_survivors(parents, worse, 2);
  CHECK(kept[0].id == 0);
  CHECK(kept[1].id == 1);
}

TEST_CASE("brain is inherited from the fitter parent") {
  Rng rng(2);
  EvolutionConfig cfg = fixtures::tiny_config();
  cfg.brain_mutation.probability = 0.0;
  cfg.task.duration = 1.0;
  for (int i = 0; i < 20; ++i) {
    Individual a = random_individual(rng, cfg);
    Individual b = random_individual(rng, cfg);
    a.id = 1;
    b.id = 2;
    a.fitness_after = std::uniform_real_distribution<double>(0, 1)(rng);
    b.fitness_after = (i % 10 == 0) ? a.fitness_after : std::uniform_real_distribution<double>(0, 1)(rng);
    const Individual child = reproduce(a, b, rng, cfg);
    CHECK(child.brain == fitter(a, b).brain);
    CHECK(child.parents == std::vector<IndividualId>{1, 2});
  }

  // Many pairs on a one-step task keep reproduction cheap.
  cfg.task.duration = 0.005;
  Individual base = random_individual(rng, cfg);
  for (int i = 0; i < 1000; ++i) {
    Individual a = base, b = base;
    a.brain = brain::Genotype::random(rng);
    b.brain = brain::Genotype::random(rng);
    a.fitness_after = std::uniform_real_distribution<double>(0, 1)(rng);
    b.fitness_after = std::uniform_real_distribution<double>(0, 1)(rng);
    const Individual child = reproduce(a, b, rng, cfg);
    CHECK(child.brain == (a.fitness_after >= b.fitness_after ? a.brain : b.brain));
  }
}

TEST_CASE("body crossover happens with the configured probability") {
  Rng rng(3);
  EvolutionConfig cfg = fixtures::tiny_config();
  cfg.body_mutation = cppn::MutationRates::none();
  cfg.task.duration = 0.005;

  const cppn::Genome ga = cppn::Genome::random_minimal(rng);
  cppn::MutationRates perturb = cppn::MutationRates::none();
  perturb.weight_perturb = 1.0;
  perturb.weight_sigma = 1.0;
  const cppn::Genome gb = cppn::mutate(ga, rng, perturb);
  const std::size_t genes = ga.connections().size();
  REQUIRE(genes >= 8);
  for (std::size_t c = 0; c < genes; ++c)
    REQUIRE(ga.connections()[c].weight != gb.connections()[c].weight);

  Individual a = random_individual(rng, cfg), b = a;
  a.body = ga;
  b.body = gb;
  a.fitness_after = 2.0;
  b.fitness_after = 1.0;
  const int n = 4000;
  int mixed = 0;
  for (int i = 0; i < n; ++i) mixed += !(reproduce(a, b, rng, cfg).body == ga);
  const double expected = 0.8 * (1.0 - std::pow(0.5, double(genes)));
  CHECK(mixed / double(n) == doctest::Approx(expected).epsilon(0.04));

  cfg.freeze_bodies = true;
  for (int i = 0; i < 50; ++i) CHECK(reproduce(a, b, rng, cfg).body == ga);
}

TEST_CASE("fitness before learning is the inherited brain's score") {
  Rng rng(4);
  const EvolutionConfig cfg = fixtures::tiny_config();
  for (int i = 0; i < 5; ++i) {
    const Individual ind = random_individual(rng, cfg);
    CHECK(ind.fitness_before == simulation::evaluate(ind.tree, ind.brain, cfg.task, cfg.surrogate));
  }
}

TEST_CASE("Lamarckian writeback and Darwinian immutability") {
  Rng rng(5);
  EvolutionConfig cfg = fixtures::tiny_config();
  Individual ind;
  do {
    ind = random_individual(rng, cfg);
  } while (brain::layout(ind.tree).cells.empty());

  Individual lam = ind, dar = ind;
  cfg.mode = Mode::Lamarckian;
  Rng r1(6);
  learn_and_evaluate(lam, r1, cfg);
  cfg.mode = Mode::Darwinian;
  Rng r2(6);
  learn_and_evaluate(dar, r2, cfg);

  CHECK(dar.brain == ind.brain);
  CHECK(lam.learned == dar.learned);
  CHECK(lam.fitness_after == dar.fitness_after);
  CHECK(lam.brain == brain::writeback(ind.brain, ind.tree, lam.learned));
  CHECK(brain::express(lam.brain, lam.tree).params == lam.learned);
  CHECK(lam.fitness_after >= lam.fitness_before);
  CHECK(lam.history.size() == cfg.revde.budget());
  CHECK(simulation::evaluate(lam.tree, lam.brain, cfg.task, cfg.surrogate) == lam.fitness_after);

  cfg.learning = false;
  Individual off = ind;
  learn_and_evaluate(off, r1, cfg);
  CHECK(off.fitness_after == off.fitness_before);
  CHECK(off.history.empty());
  CHECK(off.brain == ind.brain);
}

TEST_CASE("a run keeps mu individuals and never loses its best") {
  const EvolutionConfig cfg = fixtures::tiny_config(11);
  std::vector<Individual> final_pop;
  const auto reports = run_collect(cfg, &final_pop);
  REQUIRE(reports.size() == cfg.generations + 1);
  CHECK(final_pop.size() == cfg.mu);
  CHECK(reports[0].newborns.size() == cfg.mu);
  for (std::size_t g = 1; g < reports.size(); ++g) {
    CHECK(reports[g].population.size() == cfg.mu);
    CHECK(reports[g].newborns.size() == cfg.lambda);
    CHECK(reports[g].stats.max_fitness >= reports[g - 1].stats.max_fitness);
    CHECK(reports[g].stats.mean_parent_distance.has_value());
    for (std::size_t k = 0; k < cfg.lambda; ++k) {
      CHECK(reports[g].newborns[k].id == cfg.mu + (g - 1) * cfg.lambda + k);
      CHECK(reports[g].newborns[k].generation_born == g);
      CHECK(reports[g].newborns[k].parents.size() == 2);
    }
  }
  CHECK_FALSE(reports[0].stats.mean_parent_distance.has_value());
  CHECK(final_pop.front().fitness_after == reports.back().stats.max_fitness);
}

TEST_CASE("Darwinian brains never change after birth") {
  EvolutionConfig cfg = fixtures::tiny_config(12);
  cfg.mode = Mode::Darwinian;
  cfg.brain_mutation.probability = 0.0;
  std::map<IndividualId, brain::Genotype> born;
  std::vector<Individual> final_pop;
  const auto reports = run_collect(cfg, &final_pop);
  for (const auto& r : reports)
    for (const auto& ind : r.newborns) born.emplace(ind.id, ind.brain);
  for (const auto& ind : final_pop) CHECK(ind.brain == born.at(ind.id));
  // Without brain mutation every Darwinian brain is a copy of an initial one.
  for (const auto& r : reports)
    for (const auto& ind : r.newborns) {
      bool from_initial = false;
      for (const auto& first : reports[0].newborns) from_initial |= first.brain == ind.brain;
      CHECK(from_initial);
    }
}

TEST_CASE("results do not depend on parallelism") {
  EvolutionConfig cfg = fixtures::tiny_config(13);
  cfg.parallelism = 1;
  const auto serial = run_collect(cfg);
  cfg.parallelism = 4;
  const auto parallel = run_collect(cfg);
  CHECK(serial == parallel);
}

TEST_CASE("resuming from a population matches an uninterrupted run") {
  const EvolutionConfig cfg = fixtures::tiny_config(14);
  std::vector<Individual> full_pop;
  const auto full = run_collect(cfg, &full_pop);

  EvolutionConfig first = cfg;
  first.generations = 1;
  std::vector<Individual> mid;
  run_collect(first, &mid);
  std::vector<GenerationReport> rest;
  const auto resumed = run_experiment(cfg, [&](const GenerationReport& r) { rest.push_back(r); },
                                      ResumePoint{1, mid});
  REQUIRE(rest.size() == cfg.generations - 1);
  CHECK(rest.back() == full.back());
  CHECK(resumed == full_pop);
}

TEST_CASE("configuration validation") {
  EvolutionConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.mu = 0;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  CHECK(mode_from("darwinian") == Mode::Darwinian);
  CHECK(mode_name(Mode::Lamarckian) == "lamarckian");
  CHECK_THROWS_AS(mode_from("baldwinian"), DomainError);
}
