#include "lamarck/brain.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "lamarck/errors.hpp"

namespace lamarck::brain {

using morphology::Cell;

namespace {

constexpr std::array<Offset, 12> make_offsets() {
  std::array<Offset, 12> out{};
  std::size_t k = 0;
  for (int dx = -2; dx <= 2; ++dx) {
    for (int dy = -2; dy <= 2; ++dy) {
      int d = (dx < 0 ? -dx : dx) + (dy < 0 ? -dy : dy);
      if (d >= 1 && d <= 2) out[k++] = {dx, dy};
    }
  }
  return out;
}

constexpr std::array<Offset, 12> kOffsets = make_offsets();

}  // namespace

const std::array<Offset, 12>& neighbor_offsets() noexcept { return kOffsets; }

std::optional<std::size_t> offset_column(Offset offset) noexcept {
  auto it = std::lower_bound(kOffsets.begin(), kOffsets.end(), offset);
  if (it == kOffsets.end() || *it != offset) return std::nullopt;
  return static_cast<std::size_t>(it - kOffsets.begin()) + 1;
}

std::size_t row_index(Cell cell) {
  if (std::abs(cell.x) > kGridRadius || std::abs(cell.y) > kGridRadius)
    throw DomainError("cell (" + std::to_string(cell.x) + "," + std::to_string(cell.y) +
                      ") outside the 21x21 brain grid");
  if (cell.x == 0 && cell.y == 0) throw DomainError("the centre cell has no brain row");
  constexpr std::size_t side = 2 * kGridRadius + 1;
  constexpr std::size_t centre = kGridRadius * side + kGridRadius;
  const std::size_t linear = static_cast<std::size_t>(cell.x + kGridRadius) * side +
                             static_cast<std::size_t>(cell.y + kGridRadius);
  return linear > centre ? linear - 1 : linear;
}

Genotype Genotype::random(Rng& rng) {
  Genotype g;
  std::normal_distribution<double> normal(0.0, 1.0);
  for (double& v : g.values_) v = normal(rng);
  return g;
}

Genotype Genotype::from_values(std::vector<double> values) {
  if (values.size() != kRows * kCols)
    throw IntegrityError("brain genotype needs " + std::to_string(kRows * kCols) +
                         " values, got " + std::to_string(values.size()));
  for (double v : values)
    if (!std::isfinite(v)) throw IntegrityError("brain genotype contains a non-finite value");
  Genotype g;
  g.values_ = std::move(values);
  return g;
}

Layout layout(const morphology::ModuleTree& tree) {
  Layout out;
  std::map<CellRef, std::size_t> param_of;
  auto param = [&](CellRef c) {
    auto [it, fresh] = param_of.try_emplace(c, out.cells.size());
    if (fresh) out.cells.push_back(c);
    return it->second;
  };

  std::vector<morphology::Joint> joints;
  for (const auto& j : morphology::joints_of(tree))
    if (j.cell != Cell{0, 0}) joints.push_back(j);

  auto& net = out.network;
  std::vector<std::size_t> rows;
  for (const auto& j : joints) {
    rows.push_back(row_index(j.cell));
    net.internal.push_back(param({rows.back(), kInternalColumn}));
    net.sides.push_back(j.cell.x < 0   ? controller::Side::Left
                        : j.cell.x > 0 ? controller::Side::Right
                                       : controller::Side::Center);
    out.joint_modules.push_back(j.id);
  }

  for (std::size_t i = 0; i < joints.size(); ++i) {
    for (std::size_t k = i + 1; k < joints.size(); ++k) {
      if (morphology::tree_distance(tree, joints[i].id, joints[k].id) > 2) continue;
      if (joints[i].cell == joints[k].cell) {
        bool consecutive = true;
        for (std::size_t m = i + 1; m < k; ++m)
          if (joints[m].cell == joints[i].cell) consecutive = false;
        if (consecutive) net.couplings.push_back({i, k, param({rows[i], kSameCellColumn})});
        continue;
      }
      const std::size_t donor = rows[i] < rows[k] ? i : k;
      const std::size_t other = donor == i ? k : i;
      auto col = offset_column({joints[other].cell.x - joints[donor].cell.x,
                                joints[other].cell.y - joints[donor].cell.y});
      if (!col) continue;  // unreachable for unit-step trees
      net.couplings.push_back({donor, other, param({rows[donor], *col})});
    }
  }
  net.params.assign(out.cells.size(), 0.0);
  net.reset();
  return out;
}

controller::CpgNetwork express(const Genotype& genotype, const morphology::ModuleTree& tree) {
  Layout lay = layout(tree);
  for (std::size_t p = 0; p < lay.cells.size(); ++p)
    lay.network.params[p] = genotype.at(lay.cells[p].row, lay.cells[p].col);
  return std::move(lay.network);
}

Genotype writeback(const Genotype& genotype, const morphology::ModuleTree& tree,
                   std::span<const double> learned) {
  const Layout lay = layout(tree);
  if (learned.size() != lay.cells.size())
    throw IntegrityError("learned weights have " + std::to_string(learned.size()) +
                         " entries but the body expresses " + std::to_string(lay.cells.size()));
  Genotype out = genotype;
  for (std::size_t p = 0; p < lay.cells.size(); ++p) {
    if (!std::isfinite(learned[p])) throw IntegrityError("learned weight is not finite");
    out.at(lay.cells[p].row, lay.cells[p].col) = learned[p];
  }
  return out;
}

Genotype mutate_brain(const Genotype& genotype, Rng& rng, const MutationParams& params) {
  std::vector<double> values(genotype.values().begin(), genotype.values().end());
  std::normal_distribution<double> noise(0.0, params.sigma);
  for (double& v : values)
    if (bernoulli(rng, params.probability)) v += noise(rng);
  return Genotype::from_values(std::move(values));
}

Genotype crossover_brain(const Genotype& a, const Genotype& b, Rng& rng) {
  std::vector<double> values(a.values().begin(), a.values().end());
  auto other = b.values();
  for (std::size_t i = 0; i < values.size(); ++i)
    if (bernoulli(rng, 0.5)) values[i] = other[i];
  return Genotype::from_values(std::move(values));
}

void to_json(nlohmann::json& j, const Genotype& g) {
  j = {{"version", kFormatVersion},
       {"rows", kRows},
       {"cols", kCols},
       {"values", std::vector<double>(g.values().begin(), g.values().end())}};
}

Genotype genotype_from_json(const nlohmann::json& j) {
  if (j.at("version").get<int>() != kFormatVersion)
    throw VersionError("unsupported brain genotype version " + j.at("version").dump());
  if (j.at("rows").get<std::size_t>() != kRows || j.at("cols").get<std::size_t>() != kCols)
    throw IntegrityError("brain genotype shape must be 440 x 14");
  return Genotype::from_values(j.at("values").get<std::vector<double>>());
}

}  // namespace lamarck::brain
