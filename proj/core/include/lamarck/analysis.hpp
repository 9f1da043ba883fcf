#pragma once

// Morphological and learning metrics computed online and from run logs.

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "lamarck/evolution.hpp"
#include "lamarck/morphology.hpp"

namespace lamarck::analysis {

/// Ordered rooted tree with integer labels. Node 0 is the root; children are
/// listed in order.
struct LabeledTree {
  std::vector<int> labels;
  std::vector<std::vector<std::size_t>> children;

  std::size_t size() const noexcept { return labels.size(); }
  bool operator==(const LabeledTree&) const = default;
};

/// Label = 2 * kind + rotation; children in socket order.
LabeledTree labeled(const morphology::ModuleTree& tree);

/// Unit-cost ordered tree edit distance (Zhang-Shasha).
std::size_t tree_edit_distance(const LabeledTree& a, const LabeledTree& b);
std::size_t tree_edit_distance(const morphology::ModuleTree& a, const morphology::ModuleTree& b);

/// Mean pairwise tree edit distance. Throws DomainError for fewer than 2 trees.
double diversity(std::span<const morphology::ModuleTree> trees);
double diversity(std::span<const LabeledTree> trees);

/// Distance between the child and whichever of its recorded parents has the
/// higher fitness_after (ties: the first listed). `candidates` must contain
/// both parents; throws DomainError otherwise.
std::size_t parent_child_distance(const evolution::Individual& child,
                                  std::span<const evolution::Individual> candidates);

struct TraitVector {
  double branching = 0.0;
  double limbs = 0.0;
  double length_of_limbs = 0.0;
  double coverage = 0.0;
  double joints = 0.0;
  double proportion = 0.0;
  double symmetry = 0.0;
  double size = 0.0;

  std::array<double, 8> as_array() const noexcept {
    return {branching, limbs, length_of_limbs, coverage, joints, proportion, symmetry, size};
  }
  bool operator==(const TraitVector&) const = default;
};

inline constexpr std::array<std::string_view, 8> kTraitNames = {
    "branching", "limbs", "length_of_limbs", "coverage",
    "joints",    "proportion", "symmetry",   "size"};

/// branching       modules with >= 3 children / floor((n - 1) / 3)
/// limbs           non-core leaves
/// length_of_limbs deepest module depth / (n - 1)
/// coverage        n / cells of the 3D bounding box
/// joints          hinges / max(n - 1, 1)
/// proportion      short / long side of the 2D bounding box
/// symmetry        best fraction of modules whose mirror image across the
///                 x = 0 or y = 0 plane is also a module
/// size            n / 10
TraitVector traits(const morphology::ModuleTree& tree);

double learning_delta(const evolution::Individual& ind) noexcept;

/// Pearson correlation; NaN if either series is constant.
double pearson(std::span<const double> x, std::span<const double> y);

/// Runs the evolution+learning loop with bodies frozen to the initial
/// population's bodies and returns the per-generation mean learning delta.
std::vector<double> fixed_body_baseline(const evolution::EvolutionConfig& cfg,
                                        const evolution::ReportSink& sink = {});

/// mean(evolved) - mean(fixed)
double delta_of_delta(std::span<const double> evolved, std::span<const double> fixed);

}  // namespace lamarck::analysis
