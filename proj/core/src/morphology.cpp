#include "lamarck/morphology.hpp"

#include <array>
#include <deque>
#include <string>

#include <nlohmann/json.hpp>

#include "lamarck/errors.hpp"

namespace lamarck::morphology {

namespace {

constexpr std::array kCoreSockets = {Socket::Front, Socket::Right, Socket::Back, Socket::Left};
constexpr std::array kBrickSockets = {Socket::Front, Socket::Right, Socket::Left};
constexpr std::array kHingeSockets = {Socket::Front};

GridPos direction(const Module& m, Socket s) {
  switch (s) {
    case Socket::Front: return m.forward;
    case Socket::Right: return m.right;
    case Socket::Back: return -m.forward;
    case Socket::Left: return -m.right;
  }
  return m.forward;
}

std::string_view socket_name(Socket s) {
  switch (s) {
    case Socket::Front: return "front";
    case Socket::Right: return "right";
    case Socket::Back: return "back";
    case Socket::Left: return "left";
  }
  return "front";
}

Socket socket_from(std::string_view s) {
  for (Socket k : kCoreSockets)
    if (socket_name(k) == s) return k;
  throw DomainError("unknown socket '" + std::string(s) + "'");
}

ModuleKind kind_from(std::string_view s) {
  for (ModuleKind k : {ModuleKind::Core, ModuleKind::Brick, ModuleKind::ActiveHinge})
    if (kind_name(k) == s) return k;
  throw DomainError("unknown module kind '" + std::string(s) + "'");
}

}  // namespace

std::span<const Socket> sockets_of(ModuleKind kind) noexcept {
  switch (kind) {
    case ModuleKind::Core: return kCoreSockets;
    case ModuleKind::Brick: return kBrickSockets;
    case ModuleKind::ActiveHinge: return kHingeSockets;
  }
  return {};
}

std::string_view kind_name(ModuleKind kind) noexcept {
  switch (kind) {
    case ModuleKind::Core: return "core";
    case ModuleKind::Brick: return "brick";
    case ModuleKind::ActiveHinge: return "active_hinge";
  }
  return "core";
}

ModuleTree::ModuleTree() { modules_.push_back(Module{}); }

const Module& ModuleTree::module(std::size_t index) const {
  if (index >= modules_.size())
    throw DomainError("module index " + std::to_string(index) + " not in tree");
  return modules_[index];
}

bool ModuleTree::occupied(GridPos pos) const noexcept {
  for (const Module& m : modules_)
    if (m.pos == pos) return true;
  return false;
}

GridPos ModuleTree::socket_target(std::size_t parent, Socket socket) const {
  const Module& p = module(parent);
  return p.pos + direction(p, socket);
}

std::size_t ModuleTree::attach(std::size_t parent, Socket socket, ModuleKind kind,
                               Rotation rotation) {
  if (kind == ModuleKind::Core) throw IntegrityError("a tree has exactly one core");
  const Module& p = module(parent);
  auto allowed = sockets_of(p.kind);
  if (std::find(allowed.begin(), allowed.end(), socket) == allowed.end())
    throw IntegrityError("socket " + std::string(socket_name(socket)) + " does not exist on " +
                         std::string(kind_name(p.kind)));
  for (std::size_t c : p.children)
    if (modules_[c].socket == socket) throw IntegrityError("socket already taken");

  Module child;
  child.kind = kind;
  child.rotation = rotation;
  child.parent = parent;
  child.socket = socket;
  child.depth = p.depth + 1;
  child.pos = p.pos + direction(p, socket);
  if (occupied(child.pos)) throw IntegrityError("grid cell already occupied");

  // Yaw into the socket direction, then roll about the new forward axis.
  child.up = p.up;
  switch (socket) {
    case Socket::Front: child.forward = p.forward; child.right = p.right; break;
    case Socket::Right: child.forward = p.right; child.right = -p.forward; break;
    case Socket::Back: child.forward = -p.forward; child.right = -p.right; break;
    case Socket::Left: child.forward = -p.right; child.right = p.forward; break;
  }
  if (rotation == Rotation::Deg90) {
    GridPos r = child.right;
    child.right = child.up;
    child.up = -r;
  }

  modules_.push_back(std::move(child));
  std::size_t index = modules_.size() - 1;
  modules_[parent].children.push_back(index);
  return index;
}

ModuleTree develop(const cppn::Genome& genome, std::size_t max_modules) {
  if (max_modules < 1) throw DomainError("max_modules must be at least 1");
  ModuleTree tree;
  std::deque<std::size_t> open{0};
  while (!open.empty() && tree.module_count() < max_modules) {
    std::size_t current = open.front();
    open.pop_front();
    const ModuleKind kind = tree.module(current).kind;
    for (Socket s : sockets_of(kind)) {
      if (tree.module_count() >= max_modules) break;
      GridPos target = tree.socket_target(current, s);
      if (tree.occupied(target)) continue;
      const int depth = tree.module(current).depth + 1;
      cppn::Output out = genome.evaluate({static_cast<double>(target.x),
                                          static_cast<double>(target.y),
                                          static_cast<double>(target.z),
                                          static_cast<double>(depth)});
      // Tie priority: empty > brick > joint; NaN never wins.
      double best = out[cppn::kEmpty];
      std::optional<ModuleKind> pick;
      if (out[cppn::kBrick] > best) {
        best = out[cppn::kBrick];
        pick = ModuleKind::Brick;
      }
      if (out[cppn::kJoint] > best) pick = ModuleKind::ActiveHinge;
      if (!pick) continue;
      Rotation rot = out[cppn::kRot90] > out[cppn::kRot0] ? Rotation::Deg90 : Rotation::Deg0;
      open.push_back(tree.attach(current, s, *pick, rot));
    }
  }
  return tree;
}

std::vector<Joint> joints_of(const ModuleTree& tree) {
  std::vector<Joint> joints;
  for (std::size_t i = 0; i < tree.module_count(); ++i) {
    const Module& m = tree.modules()[i];
    if (m.kind == ModuleKind::ActiveHinge) joints.push_back({i, Cell{m.pos.x, m.pos.y}});
  }
  return joints;
}

std::size_t tree_distance(const ModuleTree& tree, std::size_t a, std::size_t b) {
  const Module* ma = &tree.module(a);
  const Module* mb = &tree.module(b);
  std::size_t steps = 0;
  while (a != b) {
    if (ma->depth >= mb->depth) {
      a = *ma->parent;
      ma = &tree.module(a);
    } else {
      b = *mb->parent;
      mb = &tree.module(b);
    }
    ++steps;
  }
  return steps;
}

namespace {

nlohmann::json node_json(const ModuleTree& tree, std::size_t index) {
  const Module& m = tree.modules()[index];
  nlohmann::json j = {{"kind", kind_name(m.kind)},
                      {"rotation", m.rotation == Rotation::Deg90 ? 90 : 0},
                      {"grid_pos", {m.pos.x, m.pos.y, m.pos.z}}};
  if (m.parent) j["socket"] = socket_name(m.socket);
  auto children = nlohmann::json::array();
  for (std::size_t c : m.children) children.push_back(node_json(tree, c));
  j["children"] = std::move(children);
  return j;
}

}  // namespace

void to_json(nlohmann::json& j, const ModuleTree& tree) { j = node_json(tree, 0); }

ModuleTree tree_from_json(const nlohmann::json& j) {
  if (kind_from(j.at("kind").get<std::string>()) != ModuleKind::Core)
    throw IntegrityError("tree root must be a core module");
  ModuleTree tree;
  std::deque<std::pair<std::size_t, const nlohmann::json*>> open{{0, &j}};
  while (!open.empty()) {
    auto [index, node] = open.front();
    open.pop_front();
    for (const auto& child : node->at("children")) {
      int rot = child.at("rotation").get<int>();
      if (rot != 0 && rot != 90) throw IntegrityError("rotation must be 0 or 90");
      std::size_t c = tree.attach(index, socket_from(child.at("socket").get<std::string>()),
                                  kind_from(child.at("kind").get<std::string>()),
                                  rot == 90 ? Rotation::Deg90 : Rotation::Deg0);
      const auto& pos = child.at("grid_pos");
      GridPos expected{pos.at(0).get<int>(), pos.at(1).get<int>(), pos.at(2).get<int>()};
      if (tree.module(c).pos != expected) throw IntegrityError("grid_pos inconsistent with sockets");
      open.emplace_back(c, &child);
    }
  }
  return tree;
}

}  // namespace lamarck::morphology
