#pragma once

// Body phenotype: a tree of Core/Brick/ActiveHinge modules on an integer grid,
// and its development from a CPPN genome.

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "lamarck/cppn.hpp"

namespace lamarck::morphology {

enum class ModuleKind : std::uint8_t { Core, Brick, ActiveHinge };
enum class Rotation : std::uint8_t { Deg0, Deg90 };

/// Attachment slots, in exploration order. Core offers all four, Brick
/// Front/Right/Left, ActiveHinge only Front.
enum class Socket : std::uint8_t { Front, Right, Back, Left };

std::span<const Socket> sockets_of(ModuleKind kind) noexcept;
std::string_view kind_name(ModuleKind kind) noexcept;

struct GridPos {
  int x = 0;
  int y = 0;
  int z = 0;

  friend GridPos operator+(GridPos a, GridPos b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend GridPos operator-(GridPos a) { return {-a.x, -a.y, -a.z}; }
  auto operator<=>(const GridPos&) const = default;
};

/// Grid coordinate with the vertical axis dropped.
struct Cell {
  int x = 0;
  int y = 0;

  auto operator<=>(const Cell&) const = default;
};

inline constexpr std::size_t kMaxModules = 10;

struct Module {
  ModuleKind kind = ModuleKind::Core;
  Rotation rotation = Rotation::Deg0;  // relative to the parent's frame
  GridPos pos;
  std::optional<std::size_t> parent;
  Socket socket = Socket::Front;  // slot on the parent this module occupies
  std::vector<std::size_t> children;
  int depth = 0;
  // Unit axes of the module's frame in grid coordinates.
  GridPos forward{0, 1, 0};
  GridPos right{1, 0, 0};
  GridPos up{0, 0, 1};

  bool operator==(const Module&) const = default;
};

/// Modules are stored in discovery order; index 0 is the Core at the origin.
class ModuleTree {
 public:
  ModuleTree();

  /// Attaches a module to `parent` at `socket`. Throws IntegrityError if the
  /// socket does not exist on the parent, is taken, or the cell is occupied.
  std::size_t attach(std::size_t parent, Socket socket, ModuleKind kind,
                     Rotation rotation = Rotation::Deg0);

  const std::vector<Module>& modules() const noexcept { return modules_; }
  const Module& module(std::size_t index) const;
  std::size_t module_count() const noexcept { return modules_.size(); }
  bool occupied(GridPos pos) const noexcept;

  /// Cell the given socket of `parent` points at.
  GridPos socket_target(std::size_t parent, Socket socket) const;

  bool operator==(const ModuleTree&) const = default;

 private:
  std::vector<Module> modules_;
};

/// Breadth-first CPPN-driven development, stopping at `max_modules`.
ModuleTree develop(const cppn::Genome& genome, std::size_t max_modules = kMaxModules);

struct Joint {
  std::size_t id = 0;  // module index
  Cell cell;

  bool operator==(const Joint&) const = default;
};

/// Active hinges in discovery order with their 2D cells.
std::vector<Joint> joints_of(const ModuleTree& tree);

/// Number of edges between two modules.
std::size_t tree_distance(const ModuleTree& tree, std::size_t a, std::size_t b);

void to_json(nlohmann::json& j, const ModuleTree& tree);
ModuleTree tree_from_json(const nlohmann::json& j);

}  // namespace lamarck::morphology
