#include "lamarck/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "lamarck/errors.hpp"

namespace lamarck::simulation {

double dist(Vec2 a, Vec2 b) noexcept { return std::hypot(a.x - b.x, a.y - b.y); }

Trajectory simulate(const morphology::ModuleTree& tree, controller::CpgNetwork net,
                    const TaskSpec& task, const SurrogateParams& params) {
  if (task.duration <= 0.0 || task.reach_radius <= 0.0)
    throw DomainError("task needs positive duration and reach radius");
  if (params.dt <= 0.0 || params.sample_rate <= 0.0)
    throw DomainError("surrogate needs positive dt and sample rate");

  const auto steps = static_cast<long long>(std::llround(task.duration / params.dt));
  const auto sample_every =
      std::max(1LL, static_cast<long long>(std::llround(1.0 / (params.sample_rate * params.dt))));
  const double body_drag = 1.0 + static_cast<double>(tree.module_count()) / 10.0;
  const std::size_t n = net.size();

  net.reset();
  Vec2 pos;
  double heading = params.initial_heading;
  std::size_t active = 0;

  auto gains_now = [&] {
    if (active >= task.targets.size()) return controller::SteerGains{};
    const Vec2 t = task.targets[active];
    return controller::steering_gains(heading, pos.x, pos.y, t.x, t.y, params.c_steer);
  };

  std::vector<double> prev(n), out(n);
  {
    const auto g = gains_now();
    for (std::size_t i = 0; i < n; ++i) {
      double gain = net.sides[i] == controller::Side::Left    ? g.left
                    : net.sides[i] == controller::Side::Right ? g.right
                                                              : 1.0;
      prev[i] = controller::output_activation(net.x[i]) * gain;
    }
  }

  Trajectory traj;
  traj.samples.reserve(static_cast<std::size_t>(steps / sample_every) + 1);
  traj.samples.push_back({0.0, pos});

  for (long long s = 1; s <= steps; ++s) {
    controller::step(net, params.dt, gains_now(), out);

    double total = 0.0, left = 0.0, right = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double rate = std::abs(out[i] - prev[i]) / params.dt;
      total += rate;
      if (net.sides[i] == controller::Side::Left) left += rate;
      if (net.sides[i] == controller::Side::Right) right += rate;
    }
    std::swap(prev, out);

    const double speed = std::min(params.c_v * total / body_drag, params.v_max);
    pos.x += speed * params.dt * std::cos(heading);
    pos.y += speed * params.dt * std::sin(heading);
    heading -= params.c_turn * (left - right) * params.dt;

    while (active < task.targets.size() && dist(pos, task.targets[active]) <= task.reach_radius)
      ++active;
    if (s % sample_every == 0)
      traj.samples.push_back({static_cast<double>(s) * params.dt, pos});
  }
  if (steps % sample_every != 0)
    traj.samples.push_back({static_cast<double>(steps) * params.dt, pos});
  traj.targets_reached = active;
  return traj;
}

std::size_t targets_reached(const Trajectory& traj, const TaskSpec& task) {
  std::size_t k = 0;
  for (const Sample& s : traj.samples)
    while (k < task.targets.size() && dist(s.pos, task.targets[k]) <= task.reach_radius) ++k;
  return std::min(std::max(k, traj.targets_reached), task.targets.size());
}

double path_length(const Trajectory& traj) {
  double length = 0.0;
  for (std::size_t i = 1; i < traj.samples.size(); ++i)
    length += dist(traj.samples[i].pos, traj.samples[i - 1].pos);
  return length;
}

double fitness(const Trajectory& traj, const TaskSpec& task) {
  if (traj.samples.empty()) throw DomainError("fitness of an empty trajectory");
  const std::size_t k = targets_reached(traj, task);
  auto point = [&](std::size_t i) { return i == 0 ? Vec2{} : task.targets[i - 1]; };

  double f = 0.0;
  for (std::size_t i = 1; i <= k; ++i) f += dist(point(i), point(i - 1));
  if (k < task.targets.size()) {
    const Vec2 end = traj.samples.back().pos;
    f += dist(point(k + 1), point(k)) - dist(end, point(k + 1));
  }
  return f - task.omega * path_length(traj);
}

Evaluator::Evaluator(morphology::ModuleTree tree, TaskSpec task, SurrogateParams params)
    : tree_(std::move(tree)),
      task_(std::move(task)),
      params_(params),
      layout_(brain::layout(tree_)) {}

Trajectory Evaluator::trace(std::span<const double> weights) const {
  if (weights.size() != dimension())
    throw DomainError("weight vector has " + std::to_string(weights.size()) +
                      " entries, body expects " + std::to_string(dimension()));
  controller::CpgNetwork net = layout_.network;
  std::copy(weights.begin(), weights.end(), net.params.begin());
  return simulate(tree_, std::move(net), task_, params_);
}

double Evaluator::operator()(std::span<const double> weights) const {
  try {
    return fitness(trace(weights), task_);
  } catch (const NumericalDivergence&) {
    return kFailedFitness;
  }
}

std::vector<double> Evaluator::weights_of(const brain::Genotype& genotype) const {
  std::vector<double> w(dimension());
  for (std::size_t p = 0; p < w.size(); ++p)
    w[p] = genotype.at(layout_.cells[p].row, layout_.cells[p].col);
  return w;
}

double Evaluator::operator()(const brain::Genotype& genotype) const {
  return (*this)(weights_of(genotype));
}

double evaluate(const morphology::ModuleTree& tree, const brain::Genotype& genotype,
                const TaskSpec& task, const SurrogateParams& params) {
  return Evaluator(tree, task, params)(genotype);
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  const auto old = os.precision(17);
  os << "t,x,y\n";
  for (const Sample& s : traj.samples) os << s.t << ',' << s.pos.x << ',' << s.pos.y << '\n';
  os.precision(old);
}

}  // namespace lamarck::simulation
