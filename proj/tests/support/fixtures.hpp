#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

#include "lamarck/cppn.hpp"
#include "lamarck/evolution.hpp"
#include "lamarck/morphology.hpp"
#include "lamarck/rng.hpp"

namespace fixtures {

using namespace lamarck;

/// Empty output = identity(0.4 d), joint = gaussian(0.5 d), brick = 0: a hinge
/// wins at depth 1, empty everywhere deeper. Develops into core + 4 hinges.
inline cppn::Genome plus_genome() {
  using cppn::Activation;
  std::vector<cppn::Node> nodes;
  for (std::size_t i = 0; i < cppn::kInputCount; ++i)
    nodes.push_back({cppn::input_id(i), cppn::NodeRole::Input, Activation::Identity});
  const Activation acts[] = {Activation::Identity, Activation::Gaussian, Activation::Identity,
                             Activation::Sigmoid, Activation::Sigmoid};
  for (std::size_t o = 0; o < cppn::kOutputCount; ++o)
    nodes.push_back({cppn::output_id(o), cppn::NodeRole::Output, acts[o]});
  const auto d = cppn::input_id(3);
  std::vector<cppn::Connection> conns = {
      {cppn::innovation_of(d, cppn::output_id(cppn::kEmpty)), d, cppn::output_id(cppn::kEmpty), 0.4, true},
      {cppn::innovation_of(d, cppn::output_id(cppn::kJoint)), d, cppn::output_id(cppn::kJoint), 0.5, true},
  };
  return cppn::Genome(nodes, conns);
}

/// Unconnected genome whose output `winner` is 1 and every other output 0.
inline cppn::Genome constant_winner(cppn::OutputSlot winner) {
  std::vector<cppn::Node> nodes;
  for (std::size_t i = 0; i < cppn::kInputCount; ++i)
    nodes.push_back({cppn::input_id(i), cppn::NodeRole::Input, cppn::Activation::Identity});
  for (std::size_t o = 0; o < cppn::kOutputCount; ++o)
    nodes.push_back({cppn::output_id(o), cppn::NodeRole::Output,
                     o == winner ? cppn::Activation::Gaussian : cppn::Activation::Identity});
  return cppn::Genome(nodes, {});
}

inline morphology::ModuleTree plus_tree() {
  morphology::ModuleTree t;
  for (auto s : {morphology::Socket::Front, morphology::Socket::Right, morphology::Socket::Back,
                 morphology::Socket::Left})
    t.attach(0, s, morphology::ModuleKind::ActiveHinge);
  return t;
}

/// Core followed by nine bricks in a straight line.
inline morphology::ModuleTree chain_tree() {
  morphology::ModuleTree t;
  std::size_t last = 0;
  for (int i = 0; i < 9; ++i) last = t.attach(last, morphology::Socket::Front, morphology::ModuleKind::Brick);
  return t;
}

/// Right brick rolled 90 degrees, then a column of `hinges` hinges stacked
/// above it, all in 2D cell (1, 0).
inline morphology::ModuleTree stacked_tree(int hinges = 2) {
  using morphology::ModuleKind;
  using morphology::Socket;
  morphology::ModuleTree t;
  const auto brick = t.attach(0, Socket::Right, ModuleKind::Brick, morphology::Rotation::Deg90);
  auto last = t.attach(brick, Socket::Right, ModuleKind::ActiveHinge);
  for (int i = 1; i < hinges; ++i) last = t.attach(last, Socket::Front, ModuleKind::ActiveHinge);
  return t;
}

inline cppn::Genome random_body(Rng& rng, int mutations = 6) {
  cppn::Genome g = cppn::Genome::random_minimal(rng);
  for (int i = 0; i < mutations; ++i) g = cppn::mutate(g, rng);
  return g;
}

inline morphology::ModuleTree random_tree(Rng& rng, int mutations = 6) {
  return morphology::develop(random_body(rng, mutations));
}

/// Small, fast evolution settings.
inline evolution::EvolutionConfig tiny_config(std::uint64_t seed = 7) {
  evolution::EvolutionConfig c;
  c.mu = 6;
  c.lambda = 3;
  c.generations = 3;
  c.seed = seed;
  c.revde.mu = 5;
  c.revde.candidates_per_iter = 6;
  c.revde.iterations = 3;
  c.task.duration = 10.0;
  return c;
}

/// Fresh directory removed on scope exit.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    path_ = std::filesystem::temp_directory_path() /
            ("lamarck-test-" + std::to_string(stamp) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace fixtures
