#pragma once

// Body genotype: a small feed-forward CPPN queried over grid coordinates.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "lamarck/rng.hpp"

namespace lamarck::cppn {

enum class Activation : std::uint8_t { Identity, Sigmoid, Sine, Gaussian, Tanh };
enum class NodeRole : std::uint8_t { Input, Hidden, Output };

using NodeId = std::uint64_t;
using Innovation = std::uint64_t;

inline constexpr std::size_t kInputCount = 4;
inline constexpr std::size_t kOutputCount = 5;

/// Query layout: (x, y, z, tree distance to core).
using Query = std::array<double, kInputCount>;
/// Output layout: (brick, joint, empty, rot0, rot90).
using Output = std::array<double, kOutputCount>;

enum OutputSlot : std::size_t { kBrick = 0, kJoint = 1, kEmpty = 2, kRot0 = 3, kRot90 = 4 };

/// Input nodes use ids [0, 4), output nodes [4, 9). Hidden ids are derived
/// from the connection they split.
constexpr NodeId input_id(std::size_t i) { return static_cast<NodeId>(i); }
constexpr NodeId output_id(std::size_t i) { return static_cast<NodeId>(kInputCount + i); }

double activate(Activation f, double x) noexcept;

struct Node {
  NodeId id = 0;
  NodeRole role = NodeRole::Hidden;
  Activation activation = Activation::Sigmoid;

  bool operator==(const Node&) const = default;
};

struct Connection {
  Innovation innovation = 0;
  NodeId from = 0;
  NodeId to = 0;
  double weight = 0.0;
  bool enabled = true;

  bool operator==(const Connection&) const = default;
};

/// Innovation ids are a pure function of the endpoints, so the same structural
/// gene carries the same id in every genome without a shared registry.
Innovation innovation_of(NodeId from, NodeId to) noexcept;
/// Id of the hidden node created by splitting connection `innovation`.
NodeId split_node_id(Innovation innovation) noexcept;

inline constexpr double kWeightLimit = 5.0;

struct MutationRates {
  double weight_perturb = 0.8;  // per connection
  double weight_sigma = 0.5;
  double add_connection = 0.1;  // per call
  double add_node = 0.05;       // per call
  double activation_swap = 0.05;

  static MutationRates none() { return {0.0, 0.0, 0.0, 0.0, 0.0}; }
  bool operator==(const MutationRates&) const = default;
};

enum class Parent : std::uint8_t { A, B };

class Genome {
 public:
  /// Same as unconnected().
  Genome();
  /// Sorts genes by id/innovation and validates. Throws IntegrityError when an
  /// invariant does not hold.
  Genome(std::vector<Node> nodes, std::vector<Connection> connections);

  /// 4 inputs and 5 outputs with no connections.
  static Genome unconnected(Activation output_activation = Activation::Sigmoid);
  /// Fully connected input->output network with N(0,1) weights.
  static Genome random_minimal(Rng& rng);

  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  const std::vector<Connection>& connections() const noexcept { return connections_; }
  const Node* find_node(NodeId id) const noexcept;
  const Connection* find_connection(Innovation innovation) const noexcept;
  bool has_path(NodeId from, NodeId to) const;

  Output evaluate(const Query& query) const;

  /// Highest innovation id present (0 for an unconnected genome).
  Innovation max_innovation() const noexcept;

  bool operator==(const Genome& other) const {
    return nodes_ == other.nodes_ && connections_ == other.connections_;
  }

  /// Returns a description of the first violated invariant, if any.
  static std::optional<std::string> check(const std::vector<Node>& nodes,
                                          const std::vector<Connection>& connections);

 private:
  std::vector<Node> nodes_;
  std::vector<Connection> connections_;
  // Node indices in evaluation order, and enabled incoming connection indices
  // per node index.
  std::vector<std::size_t> order_;
  std::vector<std::vector<std::size_t>> incoming_;
};

Genome mutate(const Genome& genome, Rng& rng, const MutationRates& rates = {});

/// NEAT crossover: matching genes drawn uniformly from either parent,
/// disjoint and excess genes from the fitter one.
Genome crossover(const Genome& a, const Genome& b, Parent fitter, Rng& rng);

void to_json(nlohmann::json& j, const Genome& g);
Genome genome_from_json(const nlohmann::json& j);

std::string_view activation_name(Activation f) noexcept;

}  // namespace lamarck::cppn
