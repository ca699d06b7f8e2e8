#include "finclear/circulation.hpp"

#include <algorithm>
#include <string>

namespace finclear {

std::span<const EdgeId> CirculationNetwork::out_edges(NodeId v) const { return out_.at(index(v)); }
std::span<const EdgeId> CirculationNetwork::in_edges(NodeId v) const { return in_.at(index(v)); }

std::optional<EdgeId> CirculationNetwork::source_edge(NodeId v) const { return source_edge_of_.at(index(v)); }

CirculationNetwork build_circulation_network(const FinancialNetwork& net) {
  require_valid(net);
  CirculationNetwork circ;
  circ.base_ = net;
  const std::size_t n = net.num_nodes();
  circ.source_ = node_at(n);
  circ.edges_ = net.edges();
  for (std::size_t v = 0; v < n; ++v) {
    circ.edges_.push_back({edge_at(circ.edges_.size()), node_at(v), circ.source_, Capacity::unbounded()});
  }
  circ.source_edge_of_.assign(n, std::nullopt);
  for (std::size_t v = 0; v < n; ++v) {
    const Money x = net.external(node_at(v));
    if (x > 0) {
      const EdgeId id = edge_at(circ.edges_.size());
      circ.edges_.push_back({id, circ.source_, node_at(v), Capacity(x)});
      circ.source_edge_of_[v] = id;
    }
  }
  circ.out_.assign(n + 1, {});
  circ.in_.assign(n + 1, {});
  for (const auto& e : circ.edges_) {
    circ.out_[index(e.src)].push_back(e.id);
    circ.in_[index(e.dst)].push_back(e.id);
  }
  return circ;
}

FlowAssignment extend_to_circulation(const CirculationNetwork& circ, const ClearingState& cs) {
  const auto& net = circ.base();
  check_consistent(net, cs);
  FlowAssignment out;
  out.flow.assign(circ.num_edges(), 0);
  std::copy(cs.flows.flow.begin(), cs.flows.flow.end(), out.flow.begin());
  for (std::size_t v = 0; v < net.num_nodes(); ++v) {
    Money paid = 0;
    for (EdgeId e : net.out_edges(node_at(v))) paid = checked_add(paid, cs.flows[e]);
    out[circ.sink_edge(node_at(v))] = checked_sub(cs.assets[v], paid);
    if (auto se = circ.source_edge(node_at(v))) out[*se] = net.external(node_at(v));
  }
  return out;
}

std::size_t CycleDecomposition::max_length() const {
  std::size_t best = 0;
  for (const auto& c : cycles) best = std::max(best, c.size());
  return best;
}

FlowAssignment CycleDecomposition::recompose(std::size_t num_edges) const {
  FlowAssignment f;
  f.flow.assign(num_edges, 0);
  for (std::size_t i = 0; i < cycles.size(); ++i) {
    for (EdgeId e : cycles[i]) f[e] = checked_add(f[e], multiplicity[i]);
  }
  return f;
}

ConservationError::ConservationError(NodeId node, Money imbalance)
    : std::invalid_argument("flow conservation violated at node " + std::to_string(index(node)) +
                            " (inflow - outflow = " + std::to_string(imbalance) + ")"),
      node_(node),
      imbalance_(imbalance) {}

void check_conservation(const CirculationNetwork& circ, const FlowAssignment& flows) {
  if (flows.flow.size() != circ.num_edges()) {
    throw InconsistentStateError("flow vector does not cover the circulation network");
  }
  for (const auto& e : circ.edges()) {
    const Money f = flows[e.id];
    if (f < 0 || (e.weight.is_bounded() && f > e.weight.amount())) {
      throw InconsistentStateError("flow on edge " + std::to_string(index(e.id)) + " outside [0, c(e)]");
    }
  }
  for (std::size_t v = 0; v < circ.num_nodes(); ++v) {
    Money balance = 0;
    for (EdgeId e : circ.in_edges(node_at(v))) balance = checked_add(balance, flows[e]);
    for (EdgeId e : circ.out_edges(node_at(v))) balance = checked_sub(balance, flows[e]);
    if (balance != 0) throw ConservationError(node_at(v), balance);
  }
}

CycleDecomposition decompose_circulation(const CirculationNetwork& circ, const FlowAssignment& flows) {
  check_conservation(circ, flows);
  FlowAssignment rest = flows;
  CycleDecomposition out;
  const std::size_t n = circ.num_nodes();

  auto next_edge = [&](NodeId v) -> std::optional<EdgeId> {
    for (EdgeId e : circ.out_edges(v)) {
      if (rest[e] > 0) return e;
    }
    return std::nullopt;
  };

  std::vector<std::ptrdiff_t> pos_on_walk(n, -1);
  for (std::size_t start = 0; start < n; ++start) {
    while (next_edge(node_at(start))) {
      // Conservation guarantees every visited node has remaining outflow.
      std::vector<EdgeId> walk;
      std::vector<NodeId> visited;
      NodeId v = node_at(start);
      while (pos_on_walk[index(v)] < 0) {
        pos_on_walk[index(v)] = static_cast<std::ptrdiff_t>(walk.size());
        visited.push_back(v);
        const EdgeId e = *next_edge(v);
        walk.push_back(e);
        v = circ.edge(e).dst;
      }
      std::vector<EdgeId> cycle(walk.begin() + pos_on_walk[index(v)], walk.end());
      for (NodeId u : visited) pos_on_walk[index(u)] = -1;
      Money mult = rest[cycle.front()];
      for (EdgeId e : cycle) mult = std::min(mult, rest[e]);
      for (EdgeId e : cycle) rest[e] -= mult;
      out.cycles.push_back(std::move(cycle));
      out.multiplicity.push_back(mult);
    }
  }
  return out;
}

}  // namespace finclear
