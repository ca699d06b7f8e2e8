#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "finclear/network.hpp"

namespace finclear {

/// The network augmented with an auxiliary source s: one unbounded (v,s) edge
/// per firm and one (s,v) edge of weight a^x_v per firm with external assets.
///
/// Edge layout: ids [0, m) are the base edges, [m, m+n) are the (v,s) edges in
/// firm order, and the (s,v) edges follow in ascending firm order. The source
/// is NodeId{n}.
class CirculationNetwork {
 public:
  const FinancialNetwork& base() const { return base_; }
  NodeId source() const { return source_; }

  std::size_t num_nodes() const { return base_.num_nodes() + 1; }
  std::size_t num_edges() const { return edges_.size(); }
  const std::vector<LiabilityEdge>& edges() const { return edges_; }
  const LiabilityEdge& edge(EdgeId e) const { return edges_.at(index(e)); }

  std::span<const EdgeId> out_edges(NodeId v) const;
  std::span<const EdgeId> in_edges(NodeId v) const;

  bool is_base_edge(EdgeId e) const { return index(e) < base_.num_edges(); }
  /// The (v,s) edge of firm v.
  EdgeId sink_edge(NodeId v) const { return edge_at(base_.num_edges() + index(v)); }
  /// The (s,v) edge of firm v, when a^x_v > 0.
  std::optional<EdgeId> source_edge(NodeId v) const;
  std::span<const EdgeId> source_edges() const { return out_edges(source_); }

  friend CirculationNetwork build_circulation_network(const FinancialNetwork& net);

 private:
  FinancialNetwork base_;
  NodeId source_{};
  std::vector<LiabilityEdge> edges_;
  std::vector<std::optional<EdgeId>> source_edge_of_;
  std::vector<std::vector<EdgeId>> out_;
  std::vector<std::vector<EdgeId>> in_;
};

/// Throws InvalidNetworkError for invalid networks.
CirculationNetwork build_circulation_network(const FinancialNetwork& net);

/// Extends real-edge flows with the auxiliary flows: a^x_v on (s,v) and the
/// surplus a_v - sum of payments on (v,s).
FlowAssignment extend_to_circulation(const CirculationNetwork& circ, const ClearingState& cs);

struct CycleDecomposition {
  std::vector<std::vector<EdgeId>> cycles;  // each a directed cycle of circulation edges
  std::vector<Money> multiplicity;

  std::size_t size() const { return cycles.size(); }
  /// Max cycle length; 0 for the empty decomposition.
  std::size_t max_length() const;
  /// Weighted edge sum over `num_edges` edges.
  FlowAssignment recompose(std::size_t num_edges) const;
};

class ConservationError : public std::invalid_argument {
 public:
  ConservationError(NodeId node, Money imbalance);
  NodeId node() const { return node_; }
  Money imbalance() const { return imbalance_; }

 private:
  NodeId node_;
  Money imbalance_;
};

/// Throws ConservationError (inflow - outflow at the first unbalanced node) or
/// InconsistentStateError for flows outside [0, capacity].
void check_conservation(const CirculationNetwork& circ, const FlowAssignment& flows);

/// Canonical decomposition: start at the smallest node with remaining outflow,
/// always leave through the smallest remaining edge, close the cycle at the
/// first repeated node, subtract its bottleneck.
CycleDecomposition decompose_circulation(const CirculationNetwork& circ, const FlowAssignment& flows);

}  // namespace finclear
