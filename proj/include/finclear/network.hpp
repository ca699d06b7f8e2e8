#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "finclear/money.hpp"

namespace finclear {

enum class NodeId : std::uint32_t {};
enum class EdgeId : std::uint32_t {};

constexpr std::size_t index(NodeId v) { return static_cast<std::size_t>(v); }
constexpr std::size_t index(EdgeId e) { return static_cast<std::size_t>(e); }
constexpr NodeId node_at(std::size_t i) { return NodeId{static_cast<std::uint32_t>(i)}; }
constexpr EdgeId edge_at(std::size_t i) { return EdgeId{static_cast<std::uint32_t>(i)}; }

struct Node {
  Money external = 0;
  std::string name;  // display label; may be empty
};

struct LiabilityEdge {
  EdgeId id{};
  NodeId src{};
  NodeId dst{};
  Capacity weight;
};

class UnknownNodeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

class InvalidNetworkError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Directed multigraph of firms. Node and edge ids are dense: node k is
/// NodeId{k}, edge k is EdgeId{k}. Malformed content (negative weights,
/// dangling endpoints, self-loops) is representable so that validate_network
/// can report it; the algorithms require a valid network.
class FinancialNetwork {
 public:
  FinancialNetwork() = default;
  /// Throws std::invalid_argument if edges[k].id != k.
  FinancialNetwork(std::vector<Node> nodes, std::vector<LiabilityEdge> edges);

  std::size_t num_nodes() const { return nodes_.size(); }
  std::size_t num_edges() const { return edges_.size(); }
  bool has_node(NodeId v) const { return index(v) < nodes_.size(); }

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<LiabilityEdge>& edges() const { return edges_; }
  const LiabilityEdge& edge(EdgeId e) const { return edges_.at(index(e)); }
  Money weight(EdgeId e) const { return edge(e).weight.amount(); }

  Money external(NodeId v) const { return node(v).external; }
  const std::string& name(NodeId v) const { return node(v).name; }
  /// Name if set, otherwise the numeric id.
  std::string label(NodeId v) const;

  /// Outgoing / incoming edges in ascending EdgeId order. Edges with dangling
  /// endpoints are left out of the adjacency.
  std::span<const EdgeId> out_edges(NodeId v) const;
  std::span<const EdgeId> in_edges(NodeId v) const;

  std::optional<NodeId> find_node(std::string_view name) const;
  /// Node by name; throws UnknownNodeError.
  NodeId node_named(std::string_view name) const;
  /// Smallest EdgeId from src to dst.
  std::optional<EdgeId> find_edge(NodeId src, NodeId dst) const;
  EdgeId edge_between(std::string_view src, std::string_view dst) const;

  Money total_external() const;

  /// Copy with node v's external assets replaced.
  FinancialNetwork with_external(NodeId v, Money amount) const;

 private:
  const Node& node(NodeId v) const;

  std::vector<Node> nodes_;
  std::vector<LiabilityEdge> edges_;
  std::vector<std::size_t> out_offsets_;
  std::vector<EdgeId> out_list_;
  std::vector<std::size_t> in_offsets_;
  std::vector<EdgeId> in_list_;
};

/// Incremental construction with ids assigned in insertion order.
class NetworkBuilder {
 public:
  NodeId add_node(std::string name = {}, Money external = 0);
  EdgeId add_edge(NodeId src, NodeId dst, Money weight);
  EdgeId add_edge(NodeId src, NodeId dst, Capacity weight);
  void set_external(NodeId v, Money amount);
  std::size_t num_nodes() const { return nodes_.size(); }
  FinancialNetwork build() const;

 private:
  std::vector<Node> nodes_;
  std::vector<LiabilityEdge> edges_;
};

enum class ViolationKind {
  NegativeWeight,
  NegativeExternal,
  DanglingEndpoint,
  SelfLoop,
  UnboundedLiability,
  TotalTooLarge,
};

struct Violation {
  ViolationKind kind;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  bool has(ViolationKind kind) const;
};

ValidationReport validate_network(const FinancialNetwork& net);

/// Throws InvalidNetworkError carrying the first violation.
void require_valid(const FinancialNetwork& net);

/// l(v): sum of outgoing weights. Throws UnknownNodeError.
Money total_liabilities(const FinancialNetwork& net, NodeId v);

/// Money flow per edge, indexed by EdgeId.
struct FlowAssignment {
  std::vector<Money> flow;

  Money operator[](EdgeId e) const { return flow[index(e)]; }
  Money& operator[](EdgeId e) { return flow[index(e)]; }
  Money total() const;
  friend bool operator==(const FlowAssignment&, const FlowAssignment&) = default;
};

struct ClearingState {
  std::vector<Money> assets;    // a_v
  std::vector<Money> internal;  // a^i_v
  FlowAssignment flows;         // real edges only

  Money asset(NodeId v) const { return assets.at(index(v)); }
  friend bool operator==(const ClearingState&, const ClearingState&) = default;
};

class InconsistentStateError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Builds the state whose assets are a^x_v plus the inflows of `flows`.
ClearingState state_from_flows(const FinancialNetwork& net, FlowAssignment flows);

/// Throws InconsistentStateError unless assets and internal assets agree with
/// the flows and every flow respects its capacity.
void check_consistent(const FinancialNetwork& net, const ClearingState& cs);

/// Rev = sum of total assets. Throws InconsistentStateError.
Money revenue(const FinancialNetwork& net, const ClearingState& cs);

}  // namespace finclear
