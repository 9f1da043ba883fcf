#pragma once

// Experiment configuration and its INI-style file format.
//
//   [evolution]   population_size, offspring_size, generations, tournament_size,
//                 mode, seed, crossover, max_modules, learning, freeze_bodies
//   [body_mutation]  weight_perturb, weight_sigma, add_connection, add_node,
//                    activation_swap
//   [brain_mutation] probability, sigma
//   [revde]       population_size, new_candidates, iterations, scaling_factor,
//                 crossover_probability, init_noise_sigma
//   [task]        targets ("x,y; x,y"), evaluation_time, reach_radius,
//                 path_penalty
//   [surrogate]   dt, sample_rate, c_v, v_max, c_turn, c_steer
//   [experiment]  repetitions, output_dir, parallelism, trace_trajectories
//
// Unknown sections or keys are rejected.

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>

#include "lamarck/evolution.hpp"

namespace lamarck {

struct ExperimentConfig {
  evolution::EvolutionConfig evolution;
  std::size_t repetitions = 20;
  std::string output_dir = "runs";
  bool trace_trajectories = false;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Full-scale defaults with parallelism set to the available cores.
ExperimentConfig default_config();

/// Small settings for quick paired comparisons: mu 8, lambda 4, 10
/// generations, RevDE with 10 vectors, 10 candidates and 4 iterations.
ExperimentConfig desk_config();

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, std::size_t line, std::string field)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line),
        field_(std::move(field)) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

/// Applies the file's settings on top of `base`. Throws ConfigError.
ExperimentConfig parse_config(const std::string& text, ExperimentConfig base = default_config());
ExperimentConfig load_config(const std::filesystem::path& path,
                             ExperimentConfig base = default_config());

/// Serializes every field with round-trip precision. Execution settings
/// (output_dir, parallelism, trace_trajectories) are left out when
/// `include_execution` is false, so the text depends only on what determines
/// the results.
std::string to_config_text(const ExperimentConfig& cfg, bool include_execution = true);

}  // namespace lamarck
