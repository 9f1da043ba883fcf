#pragma once

// Orchestration: run directories, resumable runs, paired comparisons, the
// fixed-body control, log replay and the invariant suite.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "lamarck/config.hpp"
#include "lamarck/record.hpp"

namespace lamarck::experiment {

/// Creates a fresh subdirectory of `root` named "<stem>" or "<stem>-<n>";
/// never reuses an existing one.
std::filesystem::path allocate_run_dir(const std::filesystem::path& root, const std::string& stem);

struct RunOutcome {
  record::RunRecord record;
  std::filesystem::path dir;
};

/// Runs one experiment into a new directory under cfg.output_dir, streaming
/// the event log. `progress` (optional) receives one line per generation.
RunOutcome execute_run(const ExperimentConfig& cfg, std::ostream* progress = nullptr);

/// Continues an interrupted run from its last generation barrier. Anything
/// written after the barrier is discarded first.
RunOutcome resume_run(const std::filesystem::path& dir, std::size_t parallelism,
                      std::ostream* progress = nullptr);

struct CompareRow {
  std::uint64_t seed = 0;
  evolution::Mode mode = evolution::Mode::Lamarckian;
  double final_mean_fitness = 0.0;
  double final_max_fitness = 0.0;
  double mean_fitness_before_5_10 = 0.0;  // newborns, generations 5..10
  double final_diversity = 0.0;           // mean over the last 3 generations
  double mean_learning_delta = 0.0;       // newborns, all generations
  std::string run_id;
};

CompareRow summarize(const record::RunRecord& r, const std::string& run_id);

/// Paired Lamarckian / Darwinian runs for seeds cfg.seed .. cfg.seed + seeds - 1.
/// Returns rows in (seed, lamarckian), (seed, darwinian) order.
std::vector<CompareRow> compare(const ExperimentConfig& cfg, std::size_t seeds,
                                std::ostream* progress = nullptr);
void write_compare_csv(std::ostream& os, const std::vector<CompareRow>& rows);

/// Per-generation newborn learning deltas recomputed from an event log.
std::vector<double> learning_delta_series(const std::filesystem::path& run_dir);

struct BaselineOutcome {
  std::filesystem::path evolved_dir;
  std::filesystem::path fixed_dir;
  std::vector<double> evolved_deltas;
  std::vector<double> fixed_deltas;
  double delta_of_delta = 0.0;
};

/// Evolved-body run and fixed-body control with the same seed; the delta
/// series and delta-of-delta are recomputed from the two event logs.
BaselineOutcome baseline(const ExperimentConfig& cfg, std::ostream* progress = nullptr);

struct Analysis {
  std::vector<double> learning_deltas;
  std::vector<double> fitness_before;
  bool stats_consistent = false;  // recomputed series equal the logged stats
};

Analysis analyze(const std::filesystem::path& run_dir);

struct Budget {
  std::size_t evolution_evaluations = 0;  // lambda + lambda * generations
  std::size_t assessments_per_newborn = 0;
  std::size_t paired_total = 0;  // evolution_evaluations * assessments * 2
};

Budget budget(const evolution::EvolutionConfig& cfg);

/// Invariant suite; prints one PASS/FAIL line per property. Returns the
/// number of failures.
int validate(std::ostream& os, std::uint64_t seed = 1);

}  // namespace lamarck::experiment
