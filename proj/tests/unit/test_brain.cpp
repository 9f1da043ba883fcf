#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <set>

#include <nlohmann/json.hpp>

#include "fixtures.hpp"
#include "lamarck/brain.hpp"
#include "lamarck/errors.hpp"

using namespace lamarck;
using namespace lamarck::brain;
using morphology::Cell;

namespace {

// Cells a body reads, enumerated straight from the tree: each hinge's own row
// at column 0, each nearby pair through the lower row's neighbor column, and
// consecutive hinges in one cell through column 13.
std::set<std::pair<std::size_t, std::size_t>> used_cells(const morphology::ModuleTree& tree) {
  std::vector<morphology::Joint> js;
  for (const auto& j : morphology::joints_of(tree))
    if (!(j.cell.x == 0 && j.cell.y == 0)) js.push_back(j);
  auto row = [](Cell c) {
    const int linear = (c.x + 10) * 21 + (c.y + 10);
    return static_cast<std::size_t>(linear > 220 ? linear - 1 : linear);
  };
  auto column = [](int dx, int dy) {
    std::size_t col = 1;
    for (int a = -2; a <= 2; ++a)
      for (int b = -2; b <= 2; ++b) {
        const int d = std::abs(a) + std::abs(b);
        if (d < 1 || d > 2) continue;
        if (a == dx && b == dy) return col;
        ++col;
      }
    return std::size_t{0};
  };
  std::set<std::pair<std::size_t, std::size_t>> out;
  for (const auto& j : js) out.insert({row(j.cell), 0});
  for (std::size_t i = 0; i < js.size(); ++i) {
    for (std::size_t k = i + 1; k < js.size(); ++k) {
      if (morphology::tree_distance(tree, js[i].id, js[k].id) > 2) continue;
      if (js[i].cell == js[k].cell) {
        bool between = false;
        for (std::size_t m = i + 1; m < k; ++m) between |= js[m].cell == js[i].cell;
        if (!between) out.insert({row(js[i].cell), 13});
        continue;
      }
      const bool i_donor = row(js[i].cell) < row(js[k].cell);
      const Cell d = i_donor ? js[i].cell : js[k].cell;
      const Cell o = i_donor ? js[k].cell : js[i].cell;
      const std::size_t col = column(o.x - d.x, o.y - d.y);
      if (col) out.insert({row(d), col});
    }
  }
  return out;
}

}  // namespace

TEST_CASE("row indices skip the centre") {
  CHECK(row_index({-10, -10}) == 0);
  CHECK(row_index({10, 10}) == 439);
  CHECK(row_index({0, -1}) == 219);
  CHECK(row_index({0, 1}) == 220);
  CHECK_THROWS_AS(row_index({0, 0}), DomainError);
  CHECK_THROWS_AS(row_index({11, 0}), DomainError);
  std::set<std::size_t> seen;
  for (int x = -10; x <= 10; ++x)
    for (int y = -10; y <= 10; ++y)
      if (x || y) seen.insert(row_index({x, y}));
  CHECK(seen.size() == 440);
  CHECK(*seen.rbegin() == 439);
}

TEST_CASE("twelve neighbor offsets in lexicographic order") {
  const auto& offs = neighbor_offsets();
  CHECK(offs.size() == 12);
  for (std::size_t k = 1; k < offs.size(); ++k) CHECK(offs[k - 1] < offs[k]);
  CHECK(offs.front() == Offset{-2, 0});
  CHECK(offset_column({-2, 0}) == 1u);
  CHECK(offset_column({2, 0}) == 12u);
  CHECK_FALSE(offset_column({0, 0}).has_value());
  CHECK_FALSE(offset_column({2, 1}).has_value());
}

TEST_CASE("core-only robot has an empty network") {
  Rng rng(1);
  const Genotype g = Genotype::random(rng);
  const morphology::ModuleTree core;
  CHECK(express(g, core).size() == 0);
  CHECK(writeback(g, core, std::vector<double>{}) == g);
}

TEST_CASE("plus robot is a fully coupled four-oscillator network") {
  Rng rng(2);
  const Genotype g = Genotype::random(rng);
  const auto tree = fixtures::plus_tree();
  const auto net = express(g, tree);
  CHECK(net.size() == 4);
  CHECK(net.couplings.size() == 6);
  CHECK(net.params.size() == 10);
  CHECK(net.params[0] == g.at(row_index({0, 1}), 0));
  // (0,1) and (1,0): donor is the lower row, (0,1); offset (1,-1).
  const auto col = *offset_column({1, -1});
  bool found = false;
  for (const auto& c : net.couplings)
    if (net.params[c.param] == g.at(row_index({0, 1}), col)) found = true;
  CHECK(found);
  CHECK(net.sides[1] == controller::Side::Right);
  CHECK(net.sides[3] == controller::Side::Left);
  CHECK(net.sides[0] == controller::Side::Center);
}

TEST_CASE("zero genotype gives zero weights") {
  Rng rng(3);
  for (int i = 0; i < 20; ++i) {
    const auto net = express(Genotype{}, fixtures::random_tree(rng, 10));
    for (double w : net.params) CHECK(w == 0.0);
  }
}

TEST_CASE("stacked hinges couple through the same-cell column") {
  Rng rng(4);
  const Genotype g = Genotype::random(rng);
  const auto net = express(g, fixtures::stacked_tree(2));
  REQUIRE(net.size() == 2);
  REQUIRE(net.couplings.size() == 1);
  CHECK(net.params[net.couplings[0].param] == g.at(row_index({1, 0}), kSameCellColumn));
}

TEST_CASE("hinges stacked on the core cell are not actuated") {
  Rng rng(40);
  int found = 0;
  for (int trial = 0; trial < 5000 && found < 5; ++trial) {
    const auto tree = fixtures::random_tree(rng, 12);
    const auto joints = morphology::joints_of(tree);
    std::size_t centre = 0;
    for (const auto& j : joints) centre += j.cell == Cell{0, 0};
    if (!centre) continue;
    ++found;
    CHECK(express(Genotype{}, tree).size() == joints.size() - centre);
  }
  MESSAGE("centre-cell bodies found: " << found);
}

TEST_CASE("express and writeback are inverse on used cells") {
  Rng rng(5);
  std::normal_distribution<double> noise(0.0, 2.0);
  for (int trial = 0; trial < 300; ++trial) {
    const auto tree = fixtures::random_tree(rng, 12);
    const Genotype g = Genotype::random(rng);
    const auto net = express(g, tree);
    std::vector<double> w = net.params;
    for (double& v : w) v += noise(rng);

    const Genotype g2 = writeback(g, tree, w);
    CHECK(express(g2, tree).params == w);
    CHECK(writeback(g, tree, net.params) == g);

    const auto used = used_cells(tree);
    CHECK(used.size() == w.size());
    for (std::size_t r = 0; r < kRows; ++r)
      for (std::size_t c = 0; c < kCols; ++c)
        if (!used.count({r, c})) CHECK(g2.at(r, c) == g.at(r, c));
  }
}

TEST_CASE("writeback rejects a size mismatch") {
  const auto tree = fixtures::plus_tree();
  CHECK_THROWS_AS(writeback(Genotype{}, tree, std::vector<double>(3, 0.0)), IntegrityError);
}

TEST_CASE("brain mutation statistics") {
  Rng rng(6);
  MutationParams off;
  off.probability = 0.0;
  const Genotype g = Genotype::random(rng);
  CHECK(mutate_brain(g, rng, off) == g);

  double sum = 0.0;
  std::size_t n = 0;
  while (n < 1'000'000) {
    const Genotype m = mutate_brain(g, rng);
    for (std::size_t i = 0; i < kRows * kCols; ++i) sum += std::abs(m.values()[i] - g.values()[i]);
    n += kRows * kCols;
  }
  const double expected = 0.8 * 0.5 * std::sqrt(2.0 / std::numbers::pi);
  CHECK(sum / n == doctest::Approx(expected).epsilon(0.01));
}

TEST_CASE("brain crossover picks each gene from a parent") {
  Rng rng(7);
  const Genotype g = Genotype::random(rng);
  CHECK(crossover_brain(g, g, rng) == g);
  const Genotype zeros;
  const Genotype ones = Genotype::from_values(std::vector<double>(kRows * kCols, 1.0));
  const Genotype child = crossover_brain(zeros, ones, rng);
  double sum = 0.0;
  for (double v : child.values()) {
    CHECK((v == 0.0 || v == 1.0));
    sum += v;
  }
  CHECK(sum / (kRows * kCols) == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("genotype JSON round trip") {
  Rng rng(8);
  const Genotype g = Genotype::random(rng);
  nlohmann::json j = g;
  CHECK(j.at("version") == kFormatVersion);
  CHECK(genotype_from_json(nlohmann::json::parse(j.dump())) == g);
  j["version"] = 99;
  CHECK_THROWS(genotype_from_json(j));
  CHECK_THROWS_AS(Genotype::from_values(std::vector<double>(10, 0.0)), IntegrityError);
}
