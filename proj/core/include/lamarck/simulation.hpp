#pragma once

// Point-navigation task on a deterministic planar locomotion surrogate.
//
// The surrogate stands in for rigid-body physics. Per control step:
//   activity a  = sum_j |out_j(t) - out_j(t - dt)| / dt
//   speed     v = min(c_v * a / (1 + modules / 10), v_max)
//   turn rate   = c_turn * (a_left - a_right), clockwise
// where a_left / a_right sum only over hinges left / right of the body's
// centre line. Slowing one side therefore turns the robot towards it.

#include <iosfwd>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "lamarck/brain.hpp"
#include "lamarck/controller.hpp"
#include "lamarck/morphology.hpp"

namespace lamarck::simulation {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Vec2&) const = default;
};

double dist(Vec2 a, Vec2 b) noexcept;

struct Sample {
  double t = 0.0;
  Vec2 pos;

  bool operator==(const Sample&) const = default;
};

struct Trajectory {
  std::vector<Sample> samples;  // 5 Hz, first at the origin
  std::size_t targets_reached = 0;  // detected at control-step resolution

  bool operator==(const Trajectory&) const = default;
};

struct TaskSpec {
  std::vector<Vec2> targets{{1.0, -1.0}, {0.0, -2.0}};
  double duration = 40.0;
  double reach_radius = 0.01;
  double omega = 0.1;  // path length penalty

  bool operator==(const TaskSpec&) const = default;
};

struct SurrogateParams {
  double dt = 0.005;
  double sample_rate = 5.0;
  double c_v = 0.05;
  double v_max = 0.5;
  double c_turn = 2.0;
  double c_steer = 0.7;
  double initial_heading = std::numbers::pi / 2.0;  // facing +y, the core's front

  bool operator==(const SurrogateParams&) const = default;
};

inline constexpr double kFailedFitness = -std::numeric_limits<double>::infinity();

/// Runs the network (reset to its initial state first) on the body for the
/// task duration. Throws NumericalDivergence from the controller.
Trajectory simulate(const morphology::ModuleTree& tree, controller::CpgNetwork net,
                    const TaskSpec& task, const SurrogateParams& params = {});

/// Targets reached in order, plus progress toward the next one, minus
/// omega times the sampled path length.
double fitness(const Trajectory& traj, const TaskSpec& task);

/// Number of targets reached in order by the trajectory.
std::size_t targets_reached(const Trajectory& traj, const TaskSpec& task);

double path_length(const Trajectory& traj);

/// Scores weight vectors on a fixed body. Holds the body's brain layout so
/// repeated assessments skip re-deriving the topology.
class Evaluator {
 public:
  Evaluator(morphology::ModuleTree tree, TaskSpec task, SurrogateParams params = {});

  std::size_t dimension() const noexcept { return layout_.cells.size(); }
  const brain::Layout& layout() const noexcept { return layout_; }
  const morphology::ModuleTree& tree() const noexcept { return tree_; }

  /// Fitness for the given parameters; kFailedFitness on divergence.
  double operator()(std::span<const double> weights) const;
  double operator()(const brain::Genotype& genotype) const;
  Trajectory trace(std::span<const double> weights) const;

  /// Parameters express() would read from the genotype.
  std::vector<double> weights_of(const brain::Genotype& genotype) const;

 private:
  morphology::ModuleTree tree_;
  TaskSpec task_;
  SurrogateParams params_;
  brain::Layout layout_;
};

double evaluate(const morphology::ModuleTree& tree, const brain::Genotype& genotype,
                const TaskSpec& task, const SurrogateParams& params = {});

/// CSV with header "t,x,y".
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

}  // namespace lamarck::simulation
