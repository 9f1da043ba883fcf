// lamarck: run, compare and analyze body/brain co-evolution experiments.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "lamarck/analysis.hpp"
#include "lamarck/config.hpp"
#include "lamarck/errors.hpp"
#include "lamarck/experiment.hpp"
#include "lamarck/parallel.hpp"

namespace fs = std::filesystem;
using namespace lamarck;

namespace {

struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> mode;
  std::optional<std::size_t> generations;
  std::optional<std::size_t> mu;
  std::optional<std::size_t> lambda;
  std::optional<std::string> out;
  std::optional<std::size_t> parallelism;
  bool trace = false;
  bool desk = false;
  bool quiet = false;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "Configuration file")->check(CLI::ExistingFile);
    app->add_flag("--desk", desk, "Start from the small desk-scale settings");
    app->add_option("--seed", seed, "Random seed");
    app->add_option("--mode", mode, "Inheritance mode")
        ->check(CLI::IsMember({"lamarckian", "darwinian"}));
    app->add_option("--generations", generations, "Number of generations");
    app->add_option("--mu", mu, "Population size");
    app->add_option("--lambda", lambda, "Offspring per generation");
    app->add_option("--out", out, "Output directory");
    app->add_option("--parallelism", parallelism, "Worker threads (default: all cores)")
        ->check(CLI::PositiveNumber);
    app->add_flag("--trace-trajectories", trace, "Write a trajectory CSV per robot");
    app->add_flag("-q,--quiet", quiet, "No per-generation progress");
  }

  ExperimentConfig resolve() const {
    ExperimentConfig cfg = desk ? desk_config() : default_config();
    if (!config_path.empty()) cfg = load_config(config_path, cfg);
    auto& e = cfg.evolution;
    if (seed) e.seed = *seed;
    if (mode) e.mode = evolution::mode_from(*mode);
    if (generations) e.generations = *generations;
    if (mu) e.mu = *mu;
    if (lambda) e.lambda = *lambda;
    if (out) cfg.output_dir = *out;
    if (parallelism) e.parallelism = *parallelism;
    if (trace) cfg.trace_trajectories = true;
    try {
      e.validate();
    } catch (const DomainError& ex) {
      throw ConfigError(ex.what(), 0, "");
    }
    return cfg;
  }

  std::ostream* progress() const { return quiet ? nullptr : &std::cerr; }
};

void print_series(const char* label, const std::vector<double>& v) {
  std::cout << label;
  for (double x : v) std::cout << ' ' << x;
  std::cout << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Body/brain co-evolution with lifetime learning"};
  app.require_subcommand(1);

  Overrides run_opts;
  std::string resume_dir;
  auto* run = app.add_subcommand("run", "Run a single experiment");
  run_opts.attach(run);
  run->add_option("--resume", resume_dir, "Continue an interrupted run directory")
      ->check(CLI::ExistingDirectory);

  Overrides cmp_opts;
  std::size_t seeds = 5;
  auto* cmp = app.add_subcommand("compare", "Paired Lamarckian/Darwinian runs with shared seeds");
  cmp_opts.attach(cmp);
  cmp->add_option("--seeds", seeds, "Number of seeds (starting at --seed)")
      ->check(CLI::PositiveNumber);

  Overrides base_opts;
  auto* base = app.add_subcommand("baseline", "Evolved-body run and fixed-body control");
  base_opts.attach(base);

  std::string analyze_dir;
  std::string fixed_dir;
  auto* analyze = app.add_subcommand("analyze", "Recompute learning metrics from an event log");
  analyze->add_option("run_dir", analyze_dir, "Run directory")->required()->check(CLI::ExistingDirectory);
  analyze->add_option("--fixed", fixed_dir, "Fixed-body run to compute delta-of-delta against")
      ->check(CLI::ExistingDirectory);

  std::uint64_t validate_seed = 1;
  auto* validate = app.add_subcommand("validate", "Run the invariant suite");
  validate->add_option("--seed", validate_seed, "Seed for randomized checks");

  Overrides budget_opts;
  auto* budget = app.add_subcommand("budget", "Print the evaluation budget of a configuration");
  budget_opts.attach(budget);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      experiment::RunOutcome result;
      if (!resume_dir.empty()) {
        const std::size_t p = run_opts.parallelism.value_or(default_parallelism());
        result = experiment::resume_run(resume_dir, p, run_opts.progress());
      } else {
        result = experiment::execute_run(run_opts.resolve(), run_opts.progress());
      }
      std::cout << result.dir.string() << '\n';
    } else if (*cmp) {
      ExperimentConfig cfg = cmp_opts.resolve();
      const fs::path dir = experiment::allocate_run_dir(cfg.output_dir, "compare");
      cfg.output_dir = dir.string();
      const auto rows = experiment::compare(cfg, seeds, cmp_opts.progress());
      {
        std::ofstream csv(dir / "summary.csv");
        experiment::write_compare_csv(csv, rows);
      }
      experiment::write_compare_csv(std::cout, rows);
      std::cerr << "summary written to " << (dir / "summary.csv").string() << '\n';
    } else if (*base) {
      ExperimentConfig cfg = base_opts.resolve();
      const fs::path dir = experiment::allocate_run_dir(cfg.output_dir, "baseline");
      cfg.output_dir = dir.string();
      const auto res = experiment::baseline(cfg, base_opts.progress());
      print_series("evolved_deltas", res.evolved_deltas);
      print_series("fixed_deltas", res.fixed_deltas);
      std::cout << "delta_of_delta " << res.delta_of_delta << '\n';
    } else if (*analyze) {
      const auto a = experiment::analyze(analyze_dir);
      print_series("learning_deltas", a.learning_deltas);
      print_series("fitness_before", a.fitness_before);
      std::cout << "stats_consistent " << (a.stats_consistent ? "yes" : "no") << '\n';
      if (!fixed_dir.empty()) {
        const auto fixed = experiment::learning_delta_series(fixed_dir);
        print_series("fixed_deltas", fixed);
        std::cout << "delta_of_delta " << analysis::delta_of_delta(a.learning_deltas, fixed) << '\n';
      }
      return a.stats_consistent ? 0 : 1;
    } else if (*validate) {
      return experiment::validate(std::cout, validate_seed) == 0 ? 0 : 1;
    } else if (*budget) {
      const auto b = experiment::budget(budget_opts.resolve().evolution);
      std::cout << "evolution_evaluations " << b.evolution_evaluations << '\n'
                << "assessments_per_newborn " << b.assessments_per_newborn << '\n'
                << "paired_total " << b.paired_total << '\n';
    }
  } catch (const ConfigError& ex) {
    std::cerr << "configuration error";
    if (!ex.field().empty()) std::cerr << " [" << ex.field() << "]";
    std::cerr << ": " << ex.what() << '\n';
    return 2;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 1;
  }
  return 0;
}
