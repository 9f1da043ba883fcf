#include "lamarck/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "lamarck/errors.hpp"

namespace lamarck::analysis {

using morphology::ModuleKind;
using morphology::ModuleTree;

LabeledTree labeled(const ModuleTree& tree) {
  LabeledTree out;
  out.labels.reserve(tree.module_count());
  out.children.reserve(tree.module_count());
  for (const auto& m : tree.modules()) {
    out.labels.push_back(2 * static_cast<int>(m.kind) +
                         (m.rotation == morphology::Rotation::Deg90 ? 1 : 0));
    out.children.push_back(m.children);
  }
  return out;
}

namespace {

// Post-order view with 1-based indices as in the Zhang-Shasha formulation.
struct PostOrder {
  std::vector<int> label;           // label[k], k in 1..n
  std::vector<std::size_t> leftmost;  // leftmost leaf descendant of k
  std::vector<std::size_t> keyroots;

  explicit PostOrder(const LabeledTree& t) {
    const std::size_t n = t.size();
    label.assign(n + 1, 0);
    leftmost.assign(n + 1, 0);
    std::size_t next = 1;
    // Iterative post-order: returns the post-order index of each node.
    std::vector<std::size_t> index(n, 0);
    std::vector<std::pair<std::size_t, std::size_t>> stack;
    if (n > 0) stack.emplace_back(0, 0);
    while (!stack.empty()) {
      auto& [node, child] = stack.back();
      if (child < t.children[node].size()) {
        std::size_t c = t.children[node][child++];
        stack.emplace_back(c, 0);
        continue;
      }
      const std::size_t k = next++;
      index[node] = k;
      label[k] = t.labels[node];
      leftmost[k] = t.children[node].empty() ? k : leftmost[index[t.children[node].front()]];
      stack.pop_back();
    }
    for (std::size_t k = 1; k <= n; ++k) {
      bool highest = true;
      for (std::size_t m = k + 1; m <= n; ++m)
        if (leftmost[m] == leftmost[k]) highest = false;
      if (highest) keyroots.push_back(k);
    }
  }
};

}  // namespace

std::size_t tree_edit_distance(const LabeledTree& a, const LabeledTree& b) {
  if (a.size() == 0) return b.size();
  if (b.size() == 0) return a.size();
  const PostOrder A(a), B(b);
  const std::size_t n = a.size(), m = b.size();
  std::vector<std::vector<std::size_t>> td(n + 1, std::vector<std::size_t>(m + 1, 0));
  std::vector<std::vector<std::size_t>> fd(n + 1, std::vector<std::size_t>(m + 1, 0));

  for (std::size_t i : A.keyroots) {
    for (std::size_t j : B.keyroots) {
      const std::size_t li = A.leftmost[i], lj = B.leftmost[j];
      fd[li - 1][lj - 1] = 0;
      for (std::size_t di = li; di <= i; ++di) fd[di][lj - 1] = fd[di - 1][lj - 1] + 1;
      for (std::size_t dj = lj; dj <= j; ++dj) fd[li - 1][dj] = fd[li - 1][dj - 1] + 1;
      for (std::size_t di = li; di <= i; ++di) {
        for (std::size_t dj = lj; dj <= j; ++dj) {
          const std::size_t del = fd[di - 1][dj] + 1;
          const std::size_t ins = fd[di][dj - 1] + 1;
          if (A.leftmost[di] == li && B.leftmost[dj] == lj) {
            const std::size_t rel = fd[di - 1][dj - 1] + (A.label[di] == B.label[dj] ? 0 : 1);
            fd[di][dj] = std::min({del, ins, rel});
            td[di][dj] = fd[di][dj];
          } else {
            const std::size_t sub = fd[A.leftmost[di] - 1][B.leftmost[dj] - 1] + td[di][dj];
            fd[di][dj] = std::min({del, ins, sub});
          }
        }
      }
    }
  }
  return td[n][m];
}

std::size_t tree_edit_distance(const ModuleTree& a, const ModuleTree& b) {
  return tree_edit_distance(labeled(a), labeled(b));
}

double diversity(std::span<const LabeledTree> trees) {
  if (trees.size() < 2) throw DomainError("diversity needs at least two trees");
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < trees.size(); ++i) {
    for (std::size_t j = i + 1; j < trees.size(); ++j) {
      sum += static_cast<double>(tree_edit_distance(trees[i], trees[j]));
      ++pairs;
    }
  }
  return sum / static_cast<double>(pairs);
}

double diversity(std::span<const ModuleTree> trees) {
  std::vector<LabeledTree> labeled_trees;
  labeled_trees.reserve(trees.size());
  for (const auto& t : trees) labeled_trees.push_back(labeled(t));
  return diversity(std::span<const LabeledTree>(labeled_trees));
}

std::size_t parent_child_distance(const evolution::Individual& child,
                                  std::span<const evolution::Individual> candidates) {
  if (child.parents.empty()) throw DomainError("individual has no recorded parents");
  auto find = [&](evolution::IndividualId id) -> const evolution::Individual& {
    for (const auto& c : candidates)
      if (c.id == id) return c;
    throw DomainError("parent " + std::to_string(id) + " of individual " +
                      std::to_string(child.id) + " not found");
  };
  const evolution::Individual* best = &find(child.parents.front());
  for (std::size_t p = 1; p < child.parents.size(); ++p) {
    const auto& other = find(child.parents[p]);
    best = &evolution::fitter(*best, other);
  }
  return tree_edit_distance(child.tree, best->tree);
}

TraitVector traits(const ModuleTree& tree) {
  const auto& mods = tree.modules();
  const std::size_t n = mods.size();
  TraitVector t;

  std::size_t branching = 0, leaves = 0, hinges = 0;
  int max_depth = 0;
  for (const auto& m : mods) {
    if (m.children.size() >= 3) ++branching;
    if (m.kind != ModuleKind::Core && m.children.empty()) ++leaves;
    if (m.kind == ModuleKind::ActiveHinge) ++hinges;
    max_depth = std::max(max_depth, m.depth);
  }
  const std::size_t max_branching = (n - 1) / 3;
  t.branching = max_branching == 0 ? 0.0 : static_cast<double>(branching) / max_branching;
  t.limbs = static_cast<double>(leaves);
  t.length_of_limbs = n <= 1 ? 0.0 : static_cast<double>(max_depth) / static_cast<double>(n - 1);
  t.joints = static_cast<double>(hinges) / static_cast<double>(std::max<std::size_t>(n - 1, 1));

  morphology::GridPos lo = mods.front().pos, hi = lo;
  std::set<morphology::GridPos> cells;
  for (const auto& m : mods) {
    lo = {std::min(lo.x, m.pos.x), std::min(lo.y, m.pos.y), std::min(lo.z, m.pos.z)};
    hi = {std::max(hi.x, m.pos.x), std::max(hi.y, m.pos.y), std::max(hi.z, m.pos.z)};
    cells.insert(m.pos);
  }
  const double wx = hi.x - lo.x + 1, wy = hi.y - lo.y + 1, wz = hi.z - lo.z + 1;
  t.coverage = static_cast<double>(n) / (wx * wy * wz);
  t.proportion = std::min(wx, wy) / std::max(wx, wy);

  std::size_t mirror_x = 0, mirror_y = 0;
  for (const auto& p : cells) {
    if (cells.count({-p.x, p.y, p.z})) ++mirror_x;
    if (cells.count({p.x, -p.y, p.z})) ++mirror_y;
  }
  t.symmetry = static_cast<double>(std::max(mirror_x, mirror_y)) / static_cast<double>(n);
  t.size = static_cast<double>(n) / static_cast<double>(morphology::kMaxModules);
  return t;
}

double learning_delta(const evolution::Individual& ind) noexcept {
  return ind.fitness_after - ind.fitness_before;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.empty()) throw DomainError("pearson needs equal, non-empty series");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sxy / std::sqrt(sxx * syy);
}

std::vector<double> fixed_body_baseline(const evolution::EvolutionConfig& cfg,
                                        const evolution::ReportSink& sink) {
  evolution::EvolutionConfig frozen = cfg;
  frozen.freeze_bodies = true;
  std::vector<double> deltas;
  evolution::run_experiment(frozen, [&](const evolution::GenerationReport& report) {
    deltas.push_back(report.stats.mean_learning_delta);
    if (sink) sink(report);
  });
  return deltas;
}

double delta_of_delta(std::span<const double> evolved, std::span<const double> fixed) {
  if (evolved.empty() || fixed.empty()) throw DomainError("delta_of_delta needs non-empty series");
  auto mean = [](std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  };
  return mean(evolved) - mean(fixed);
}

}  // namespace lamarck::analysis
