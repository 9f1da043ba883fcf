#pragma once

// Brain genotype: a fixed 440 x 14 matrix indexed by the 2D grid cell of each
// hinge. Expression reads a body-dependent subset of cells into a CPG network;
// writeback stores learned values into exactly those cells, so the mapping is
// invertible on the cells a body uses.

#include <array>
#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "lamarck/controller.hpp"
#include "lamarck/morphology.hpp"
#include "lamarck/rng.hpp"

namespace lamarck::brain {

inline constexpr int kGridRadius = 10;
inline constexpr std::size_t kRows = 440;  // 21 * 21 - 1
inline constexpr std::size_t kCols = 14;
inline constexpr std::size_t kInternalColumn = 0;
inline constexpr std::size_t kSameCellColumn = 13;
inline constexpr int kFormatVersion = 1;

struct Offset {
  int dx = 0;
  int dy = 0;

  auto operator<=>(const Offset&) const = default;
};

/// The 12 cells at Manhattan distance 1..2, lexicographic in (dx, dy). Offset k
/// lives in column k + 1.
const std::array<Offset, 12>& neighbor_offsets() noexcept;
std::optional<std::size_t> offset_column(Offset offset) noexcept;

/// Row of a non-centre cell with |x|, |y| <= 10. Throws DomainError otherwise.
std::size_t row_index(morphology::Cell cell);

class Genotype {
 public:
  Genotype() : values_(kRows * kCols, 0.0) {}

  /// All entries i.i.d. N(0, 1).
  static Genotype random(Rng& rng);
  /// Takes a row-major buffer of exactly 6160 finite values.
  static Genotype from_values(std::vector<double> values);

  double at(std::size_t row, std::size_t col) const { return values_[row * kCols + col]; }
  double& at(std::size_t row, std::size_t col) { return values_[row * kCols + col]; }
  std::span<const double> values() const noexcept { return values_; }

  bool operator==(const Genotype&) const = default;

 private:
  std::vector<double> values_;
};

struct CellRef {
  std::size_t row = 0;
  std::size_t col = 0;

  auto operator<=>(const CellRef&) const = default;
};

/// CPG network topology for a body plus, for every network parameter, the
/// genotype cell it is read from.
struct Layout {
  controller::CpgNetwork network;  // params left zero
  std::vector<CellRef> cells;
  std::vector<std::size_t> joint_modules;  // module index per oscillator
};

/// Distinct cells in parameter order: every hinge's internal weight (hinge
/// order), then one coupling per hinge pair at tree distance <= 2, stored in
/// the row of the hinge with the lower row index. Hinges sharing a 2D cell
/// couple through column 13, consecutive pairs only. Hinges directly above
/// or below the core (2D cell (0,0)) have no genotype row and are left
/// unactuated.
Layout layout(const morphology::ModuleTree& tree);

controller::CpgNetwork express(const Genotype& genotype, const morphology::ModuleTree& tree);

/// Writes `learned` (one value per network parameter) into the cells express
/// reads. Throws IntegrityError on a size mismatch.
Genotype writeback(const Genotype& genotype, const morphology::ModuleTree& tree,
                   std::span<const double> learned);

struct MutationParams {
  double probability = 0.8;
  double sigma = 0.5;

  bool operator==(const MutationParams&) const = default;
};

Genotype mutate_brain(const Genotype& genotype, Rng& rng, const MutationParams& params = {});
Genotype crossover_brain(const Genotype& a, const Genotype& b, Rng& rng);

void to_json(nlohmann::json& j, const Genotype& g);
Genotype genotype_from_json(const nlohmann::json& j);

}  // namespace lamarck::brain
