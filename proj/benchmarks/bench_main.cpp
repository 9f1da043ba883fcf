#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "lamarck/analysis.hpp"
#include "lamarck/brain.hpp"
#include "lamarck/cppn.hpp"
#include "lamarck/learner.hpp"
#include "lamarck/morphology.hpp"
#include "lamarck/simulation.hpp"

using namespace lamarck;

namespace {

// A body with plenty of hinges, found by developing mutated random genomes.
morphology::ModuleTree busy_body(std::uint64_t seed) {
  Rng rng(seed);
  morphology::ModuleTree best;
  std::size_t hinges = 0;
  for (int i = 0; i < 200; ++i) {
    cppn::Genome g = cppn::Genome::random_minimal(rng);
    for (int m = 0; m < 10; ++m) g = cppn::mutate(g, rng);
    auto tree = morphology::develop(g);
    const auto n = morphology::joints_of(tree).size();
    if (n > hinges) {
      hinges = n;
      best = std::move(tree);
    }
  }
  return best;
}

void BM_Develop(benchmark::State& state) {
  Rng rng(1);
  cppn::Genome g = cppn::Genome::random_minimal(rng);
  for (int m = 0; m < 10; ++m) g = cppn::mutate(g, rng);
  for (auto _ : state) benchmark::DoNotOptimize(morphology::develop(g));
}
BENCHMARK(BM_Develop);

void BM_ExpressWriteback(benchmark::State& state) {
  const auto tree = busy_body(2);
  Rng rng(2);
  const auto g = brain::Genotype::random(rng);
  for (auto _ : state) {
    auto net = brain::express(g, tree);
    benchmark::DoNotOptimize(brain::writeback(g, tree, net.params));
  }
}
BENCHMARK(BM_ExpressWriteback);

void BM_Evaluate(benchmark::State& state) {
  const auto tree = busy_body(3);
  Rng rng(3);
  const auto g = brain::Genotype::random(rng);
  const simulation::Evaluator eval(tree, simulation::TaskSpec{});
  const auto w = eval.weights_of(g);
  for (auto _ : state) benchmark::DoNotOptimize(eval(w));
  state.counters["oscillators"] = static_cast<double>(eval.layout().network.size());
}
BENCHMARK(BM_Evaluate)->Unit(benchmark::kMillisecond);

void BM_TreeEditDistance(benchmark::State& state) {
  const auto a = busy_body(4);
  const auto b = busy_body(5);
  for (auto _ : state) benchmark::DoNotOptimize(analysis::tree_edit_distance(a, b));
}
BENCHMARK(BM_TreeEditDistance);

void BM_LearnSphere(benchmark::State& state) {
  const learner::RevDeConfig cfg;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    Rng rng(++seed);
    benchmark::DoNotOptimize(learner::learn(std::vector<double>(10, 0.3), [](std::span<const double> w) {
      double s = 0.0;
      for (double x : w) s -= x * x;
      return s;
    }, cfg, rng));
  }
}
BENCHMARK(BM_LearnSphere);

void BM_LearnBody(benchmark::State& state) {
  const auto tree = busy_body(6);
  Rng rng(6);
  const auto g = brain::Genotype::random(rng);
  learner::RevDeConfig cfg;
  cfg.candidates_per_iter = 10;
  cfg.iterations = 4;
  const simulation::Evaluator eval(tree, simulation::TaskSpec{});
  const auto w = eval.weights_of(g);
  for (auto _ : state) {
    Rng lrng(7);
    benchmark::DoNotOptimize(
        learner::learn(w, [&](std::span<const double> x) { return eval(x); }, cfg, lrng));
  }
}
BENCHMARK(BM_LearnBody)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
