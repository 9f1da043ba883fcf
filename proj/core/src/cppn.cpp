#include "lamarck/cppn.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "lamarck/errors.hpp"

namespace lamarck::cppn {

namespace {

constexpr std::array kHiddenActivations = {Activation::Identity, Activation::Sigmoid,
                                           Activation::Sine, Activation::Gaussian,
                                           Activation::Tanh};

Activation random_activation(Rng& rng) {
  return kHiddenActivations[uniform_index(rng, kHiddenActivations.size())];
}

std::size_t index_of(const std::vector<Node>& nodes, NodeId id) {
  auto it = std::lower_bound(nodes.begin(), nodes.end(), id,
                             [](const Node& n, NodeId v) { return n.id < v; });
  assert(it != nodes.end() && it->id == id);
  return static_cast<std::size_t>(it - nodes.begin());
}

// Kahn's algorithm over all connections (disabled ones included, since
// crossover may re-enable them). Returns nullopt on a cycle.
std::optional<std::vector<std::size_t>> topological_order(const std::vector<Node>& nodes,
                                                          const std::vector<Connection>& conns) {
  std::vector<std::size_t> indegree(nodes.size(), 0);
  std::vector<std::vector<std::size_t>> out(nodes.size());
  for (const auto& c : conns) {
    std::size_t f = index_of(nodes, c.from);
    std::size_t t = index_of(nodes, c.to);
    out[f].push_back(t);
    ++indegree[t];
  }
  std::set<std::size_t> ready;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (indegree[i] == 0) ready.insert(i);
  std::vector<std::size_t> order;
  order.reserve(nodes.size());
  while (!ready.empty()) {
    std::size_t i = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(i);
    for (std::size_t t : out[i])
      if (--indegree[t] == 0) ready.insert(t);
  }
  if (order.size() != nodes.size()) return std::nullopt;
  return order;
}

void sort_genes(std::vector<Node>& nodes, std::vector<Connection>& conns) {
  std::sort(nodes.begin(), nodes.end(), [](const Node& a, const Node& b) { return a.id < b.id; });
  std::sort(conns.begin(), conns.end(),
            [](const Connection& a, const Connection& b) { return a.innovation < b.innovation; });
}

}  // namespace

double activate(Activation f, double x) noexcept {
  switch (f) {
    case Activation::Identity: return x;
    case Activation::Sigmoid: return 1.0 / (1.0 + std::exp(-x));
    case Activation::Sine: return std::sin(x);
    case Activation::Gaussian: return std::exp(-x * x);
    case Activation::Tanh: return std::tanh(x);
  }
  return x;
}

std::string_view activation_name(Activation f) noexcept {
  switch (f) {
    case Activation::Identity: return "identity";
    case Activation::Sigmoid: return "sigmoid";
    case Activation::Sine: return "sine";
    case Activation::Gaussian: return "gaussian";
    case Activation::Tanh: return "tanh";
  }
  return "identity";
}

Innovation innovation_of(NodeId from, NodeId to) noexcept {
  return splitmix64(splitmix64(from) ^ (to * 0xd6e8feb86659fd93ULL));
}

NodeId split_node_id(Innovation innovation) noexcept {
  NodeId id = splitmix64(innovation ^ 0xa0761d6478bd642fULL);
  return id < 16 ? id + 16 : id;
}

std::optional<std::string> Genome::check(const std::vector<Node>& nodes,
                                         const std::vector<Connection>& connections) {
  std::size_t inputs = 0, outputs = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const Node& n = nodes[i];
    if (i > 0 && nodes[i - 1].id >= n.id) return "node ids not unique";
    switch (n.role) {
      case NodeRole::Input:
        if (n.id >= kInputCount) return "input node with non-input id";
        ++inputs;
        break;
      case NodeRole::Output:
        if (n.id < kInputCount || n.id >= kInputCount + kOutputCount)
          return "output node with non-output id";
        ++outputs;
        break;
      case NodeRole::Hidden:
        if (n.id < kInputCount + kOutputCount) return "hidden node with reserved id";
        break;
    }
  }
  if (inputs != kInputCount) return "expected 4 input nodes";
  if (outputs != kOutputCount) return "expected 5 output nodes";

  auto find = [&](NodeId id) -> const Node* {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), id,
                               [](const Node& n, NodeId v) { return n.id < v; });
    return it != nodes.end() && it->id == id ? &*it : nullptr;
  };
  for (std::size_t i = 0; i < connections.size(); ++i) {
    const Connection& c = connections[i];
    if (i > 0 && connections[i - 1].innovation >= c.innovation) return "innovation ids not unique";
    const Node* from = find(c.from);
    const Node* to = find(c.to);
    if (!from || !to) return "connection references a missing node";
    if (c.innovation != innovation_of(c.from, c.to)) return "innovation id does not match endpoints";
    if (to->role == NodeRole::Input) return "connection into an input node";
    if (from->role == NodeRole::Output) return "connection out of an output node";
    if (!std::isfinite(c.weight)) return "non-finite weight";
  }
  if (!topological_order(nodes, connections)) return "connection graph has a cycle";
  return std::nullopt;
}

Genome::Genome(std::vector<Node> nodes, std::vector<Connection> connections)
    : nodes_(std::move(nodes)), connections_(std::move(connections)) {
  sort_genes(nodes_, connections_);
  if (auto problem = check(nodes_, connections_)) throw IntegrityError("cppn genome: " + *problem);
  order_ = *topological_order(nodes_, connections_);
  incoming_.resize(nodes_.size());
  for (std::size_t k = 0; k < connections_.size(); ++k)
    if (connections_[k].enabled) incoming_[index_of(nodes_, connections_[k].to)].push_back(k);
}

Genome::Genome() : Genome(unconnected()) {}

Genome Genome::unconnected(Activation output_activation) {
  std::vector<Node> nodes;
  for (std::size_t i = 0; i < kInputCount; ++i)
    nodes.push_back({input_id(i), NodeRole::Input, Activation::Identity});
  for (std::size_t i = 0; i < kOutputCount; ++i)
    nodes.push_back({output_id(i), NodeRole::Output, output_activation});
  return Genome(std::move(nodes), {});
}

Genome Genome::random_minimal(Rng& rng) {
  Genome base = unconnected();
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Connection> conns;
  for (std::size_t i = 0; i < kInputCount; ++i) {
    for (std::size_t o = 0; o < kOutputCount; ++o) {
      double w = std::clamp(normal(rng), -kWeightLimit, kWeightLimit);
      conns.push_back({innovation_of(input_id(i), output_id(o)), input_id(i), output_id(o), w, true});
    }
  }
  return Genome(base.nodes_, std::move(conns));
}

const Node* Genome::find_node(NodeId id) const noexcept {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id,
                             [](const Node& n, NodeId v) { return n.id < v; });
  return it != nodes_.end() && it->id == id ? &*it : nullptr;
}

const Connection* Genome::find_connection(Innovation innovation) const noexcept {
  auto it = std::lower_bound(connections_.begin(), connections_.end(), innovation,
                             [](const Connection& c, Innovation v) { return c.innovation < v; });
  return it != connections_.end() && it->innovation == innovation ? &*it : nullptr;
}

bool Genome::has_path(NodeId from, NodeId to) const {
  if (from == to) return true;
  std::vector<NodeId> stack{from};
  std::set<NodeId> seen{from};
  while (!stack.empty()) {
    NodeId n = stack.back();
    stack.pop_back();
    for (const auto& c : connections_) {
      if (c.from != n) continue;
      if (c.to == to) return true;
      if (seen.insert(c.to).second) stack.push_back(c.to);
    }
  }
  return false;
}

Innovation Genome::max_innovation() const noexcept {
  return connections_.empty() ? 0 : connections_.back().innovation;
}

Output Genome::evaluate(const Query& query) const {
  assert(order_.size() == nodes_.size());
  std::vector<double> value(nodes_.size(), 0.0);
  for (std::size_t idx : order_) {
    const Node& n = nodes_[idx];
    if (n.role == NodeRole::Input) {
      value[idx] = query[n.id];
      continue;
    }
    double sum = 0.0;
    for (std::size_t k : incoming_[idx]) {
      const Connection& c = connections_[k];
      sum += c.weight * value[index_of(nodes_, c.from)];
    }
    value[idx] = activate(n.activation, sum);
  }
  Output out{};
  for (std::size_t o = 0; o < kOutputCount; ++o) out[o] = value[index_of(nodes_, output_id(o))];
  return out;
}

Genome mutate(const Genome& genome, Rng& rng, const MutationRates& rates) {
  std::vector<Node> nodes = genome.nodes();
  std::vector<Connection> conns = genome.connections();

  std::normal_distribution<double> perturb(0.0, rates.weight_sigma);
  for (auto& c : conns) {
    if (bernoulli(rng, rates.weight_perturb))
      c.weight = std::clamp(c.weight + perturb(rng), -kWeightLimit, kWeightLimit);
  }

  const double roll = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  if (roll < rates.add_node) {
    std::vector<std::size_t> splittable;
    for (std::size_t k = 0; k < conns.size(); ++k)
      if (conns[k].enabled && !genome.find_node(split_node_id(conns[k].innovation)))
        splittable.push_back(k);
    if (!splittable.empty()) {
      Connection& old = conns[splittable[uniform_index(rng, splittable.size())]];
      old.enabled = false;
      NodeId mid = split_node_id(old.innovation);
      nodes.push_back({mid, NodeRole::Hidden, random_activation(rng)});
      Connection in{innovation_of(old.from, mid), old.from, mid, 1.0, true};
      Connection out{innovation_of(mid, old.to), mid, old.to, old.weight, true};
      conns.push_back(in);
      conns.push_back(out);
    }
  } else if (roll < rates.add_node + rates.add_connection) {
    // Enumerate every legal new edge; choosing among them replaces rejection
    // sampling and leaves saturated genomes unchanged.
    const auto& ns = genome.nodes();
    const std::size_t n = ns.size();
    std::vector<std::vector<std::size_t>> succ(n);
    for (const auto& c : genome.connections())
      succ[index_of(ns, c.from)].push_back(index_of(ns, c.to));
    // reach[a][b]: b is reachable from a (disabled edges included).
    std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
    std::vector<std::size_t> stack;
    for (std::size_t src = 0; src < n; ++src) {
      reach[src][src] = 1;
      stack.assign(1, src);
      while (!stack.empty()) {
        const std::size_t u = stack.back();
        stack.pop_back();
        for (std::size_t v : succ[u])
          if (!reach[src][v]) {
            reach[src][v] = 1;
            stack.push_back(v);
          }
      }
    }
    std::vector<std::pair<NodeId, NodeId>> legal;
    for (std::size_t fi = 0; fi < n; ++fi) {
      const Node& from = ns[fi];
      if (from.role == NodeRole::Output) continue;
      for (std::size_t ti = 0; ti < n; ++ti) {
        const Node& to = ns[ti];
        if (to.role == NodeRole::Input || ti == fi) continue;
        if (reach[ti][fi]) continue;
        if (genome.find_connection(innovation_of(from.id, to.id))) continue;
        legal.emplace_back(from.id, to.id);
      }
    }
    if (!legal.empty()) {
      auto [f, t] = legal[uniform_index(rng, legal.size())];
      double w = std::clamp(std::normal_distribution<double>(0.0, 1.0)(rng), -kWeightLimit,
                            kWeightLimit);
      conns.push_back({innovation_of(f, t), f, t, w, true});
    }
  }

  if (bernoulli(rng, rates.activation_swap)) {
    std::vector<std::size_t> hidden;
    for (std::size_t i = 0; i < nodes.size(); ++i)
      if (nodes[i].role == NodeRole::Hidden) hidden.push_back(i);
    if (!hidden.empty()) {
      Node& n = nodes[hidden[uniform_index(rng, hidden.size())]];
      Activation next = n.activation;
      while (next == n.activation) next = random_activation(rng);
      n.activation = next;
    }
  }

  return Genome(std::move(nodes), std::move(conns));
}

Genome crossover(const Genome& a, const Genome& b, Parent fitter, Rng& rng) {
  const Genome& best = fitter == Parent::A ? a : b;
  const Genome& other = fitter == Parent::A ? b : a;

  // The child's structure is exactly the fitter parent's; only the values of
  // matching genes are mixed. This keeps the child acyclic.
  std::vector<Node> nodes;
  nodes.reserve(best.nodes().size());
  for (const Node& n : best.nodes()) {
    const Node* match = other.find_node(n.id);
    if (n.role == NodeRole::Hidden && match && bernoulli(rng, 0.5))
      nodes.push_back(*match);
    else
      nodes.push_back(n);
  }
  std::vector<Connection> conns;
  conns.reserve(best.connections().size());
  for (const Connection& c : best.connections()) {
    const Connection* match = other.find_connection(c.innovation);
    conns.push_back(match && bernoulli(rng, 0.5) ? *match : c);
  }
  return Genome(std::move(nodes), std::move(conns));
}

namespace {

NodeRole role_from(std::string_view s) {
  if (s == "input") return NodeRole::Input;
  if (s == "output") return NodeRole::Output;
  if (s == "hidden") return NodeRole::Hidden;
  throw DomainError("unknown cppn node role '" + std::string(s) + "'");
}

std::string_view role_name(NodeRole r) {
  switch (r) {
    case NodeRole::Input: return "input";
    case NodeRole::Output: return "output";
    case NodeRole::Hidden: return "hidden";
  }
  return "hidden";
}

Activation activation_from(std::string_view s) {
  for (Activation f : kHiddenActivations)
    if (activation_name(f) == s) return f;
  throw DomainError("unknown cppn activation '" + std::string(s) + "'");
}

}  // namespace

void to_json(nlohmann::json& j, const Genome& g) {
  auto nodes = nlohmann::json::array();
  for (const Node& n : g.nodes())
    nodes.push_back({{"id", n.id}, {"role", role_name(n.role)},
                     {"activation", activation_name(n.activation)}});
  auto conns = nlohmann::json::array();
  for (const Connection& c : g.connections())
    conns.push_back({{"innovation", c.innovation}, {"from", c.from}, {"to", c.to},
                     {"weight", c.weight}, {"enabled", c.enabled}});
  j = {{"nodes", std::move(nodes)}, {"connections", std::move(conns)},
       {"innovation_counter", g.max_innovation()}};
}

Genome genome_from_json(const nlohmann::json& j) {
  std::vector<Node> nodes;
  for (const auto& n : j.at("nodes"))
    nodes.push_back({n.at("id").get<NodeId>(), role_from(n.at("role").get<std::string>()),
                     activation_from(n.at("activation").get<std::string>())});
  std::vector<Connection> conns;
  for (const auto& c : j.at("connections"))
    conns.push_back({c.at("innovation").get<Innovation>(), c.at("from").get<NodeId>(),
                     c.at("to").get<NodeId>(), c.at("weight").get<double>(),
                     c.at("enabled").get<bool>()});
  return Genome(std::move(nodes), std::move(conns));
}

}  // namespace lamarck::cppn
