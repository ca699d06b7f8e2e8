#include "finclear/network.hpp"

#include <algorithm>
#include <sstream>

namespace finclear {

namespace {

// CSR adjacency keyed by one endpoint; edges kept in ascending id order.
void build_adjacency(std::size_t n, const std::vector<LiabilityEdge>& edges, bool by_src,
                     std::vector<std::size_t>& offsets, std::vector<EdgeId>& list) {
  offsets.assign(n + 1, 0);
  for (const auto& e : edges) {
    if (index(e.src) >= n || index(e.dst) >= n) continue;
    ++offsets[index(by_src ? e.src : e.dst) + 1];
  }
  for (std::size_t i = 0; i < n; ++i) offsets[i + 1] += offsets[i];
  list.assign(offsets[n], EdgeId{});
  std::vector<std::size_t> fill(offsets.begin(), offsets.end() - 1);
  for (const auto& e : edges) {
    if (index(e.src) >= n || index(e.dst) >= n) continue;
    list[fill[index(by_src ? e.src : e.dst)]++] = e.id;
  }
}

}  // namespace

FinancialNetwork::FinancialNetwork(std::vector<Node> nodes, std::vector<LiabilityEdge> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)) {
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    if (index(edges_[k].id) != k) throw std::invalid_argument("edge ids must be dense and ordered");
  }
  build_adjacency(nodes_.size(), edges_, true, out_offsets_, out_list_);
  build_adjacency(nodes_.size(), edges_, false, in_offsets_, in_list_);
}

const Node& FinancialNetwork::node(NodeId v) const {
  if (!has_node(v)) throw UnknownNodeError("unknown node " + std::to_string(index(v)));
  return nodes_[index(v)];
}

std::string FinancialNetwork::label(NodeId v) const {
  const auto& n = node(v);
  return n.name.empty() ? std::to_string(index(v)) : n.name;
}

std::span<const EdgeId> FinancialNetwork::out_edges(NodeId v) const {
  node(v);
  return {out_list_.data() + out_offsets_[index(v)], out_list_.data() + out_offsets_[index(v) + 1]};
}

std::span<const EdgeId> FinancialNetwork::in_edges(NodeId v) const {
  node(v);
  return {in_list_.data() + in_offsets_[index(v)], in_list_.data() + in_offsets_[index(v) + 1]};
}

std::optional<NodeId> FinancialNetwork::find_node(std::string_view name) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].name == name) return node_at(i);
  }
  return std::nullopt;
}

NodeId FinancialNetwork::node_named(std::string_view name) const {
  if (auto v = find_node(name)) return *v;
  throw UnknownNodeError("no node named '" + std::string(name) + "'");
}

std::optional<EdgeId> FinancialNetwork::find_edge(NodeId src, NodeId dst) const {
  for (EdgeId e : out_edges(src)) {
    if (edges_[index(e)].dst == dst) return e;
  }
  return std::nullopt;
}

EdgeId FinancialNetwork::edge_between(std::string_view src, std::string_view dst) const {
  if (auto e = find_edge(node_named(src), node_named(dst))) return *e;
  throw std::out_of_range("no edge " + std::string(src) + " -> " + std::string(dst));
}

Money FinancialNetwork::total_external() const {
  Money total = 0;
  for (const auto& n : nodes_) total = checked_add(total, n.external);
  return total;
}

FinancialNetwork FinancialNetwork::with_external(NodeId v, Money amount) const {
  node(v);
  auto nodes = nodes_;
  nodes[index(v)].external = amount;
  return FinancialNetwork(std::move(nodes), edges_);
}

NodeId NetworkBuilder::add_node(std::string name, Money external) {
  nodes_.push_back(Node{external, std::move(name)});
  return node_at(nodes_.size() - 1);
}

EdgeId NetworkBuilder::add_edge(NodeId src, NodeId dst, Money weight) {
  return add_edge(src, dst, Capacity(weight));
}

EdgeId NetworkBuilder::add_edge(NodeId src, NodeId dst, Capacity weight) {
  const EdgeId id = edge_at(edges_.size());
  edges_.push_back(LiabilityEdge{id, src, dst, weight});
  return id;
}

void NetworkBuilder::set_external(NodeId v, Money amount) { nodes_.at(index(v)).external = amount; }

FinancialNetwork NetworkBuilder::build() const { return FinancialNetwork(nodes_, edges_); }

bool ValidationReport::has(ViolationKind kind) const {
  return std::any_of(violations.begin(), violations.end(),
                     [kind](const Violation& v) { return v.kind == kind; });
}

ValidationReport validate_network(const FinancialNetwork& net) {
  ValidationReport report;
  auto add = [&](ViolationKind kind, const std::string& msg) { report.violations.push_back({kind, msg}); };

  __int128 total = 0;
  for (std::size_t i = 0; i < net.num_nodes(); ++i) {
    const Money x = net.nodes()[i].external;
    if (x < 0) add(ViolationKind::NegativeExternal, "node " + std::to_string(i) + ": negative external assets");
    total += x;
  }
  for (const auto& e : net.edges()) {
    const std::string where = "edge " + std::to_string(index(e.id)) + ": ";
    if (e.weight.is_unbounded()) {
      add(ViolationKind::UnboundedLiability, where + "unbounded weight on a liability edge");
    } else if (e.weight.amount() < 0) {
      add(ViolationKind::NegativeWeight, where + "negative weight");
    } else {
      total += e.weight.amount();
    }
    const bool src_ok = net.has_node(e.src);
    const bool dst_ok = net.has_node(e.dst);
    if (!src_ok || !dst_ok) {
      add(ViolationKind::DanglingEndpoint, where + "dangling endpoint");
    } else if (e.src == e.dst) {
      add(ViolationKind::SelfLoop, where + "self-loop");
    }
  }
  if (total > static_cast<__int128>(kMaxTotalWeight)) {
    add(ViolationKind::TotalTooLarge, "total weight exceeds 2^62");
  }
  return report;
}

void require_valid(const FinancialNetwork& net) {
  const auto report = validate_network(net);
  if (!report.ok()) throw InvalidNetworkError(report.violations.front().message);
}

Money total_liabilities(const FinancialNetwork& net, NodeId v) {
  Money total = 0;
  for (EdgeId e : net.out_edges(v)) total = checked_add(total, net.weight(e));
  return total;
}

Money FlowAssignment::total() const {
  Money t = 0;
  for (Money f : flow) t = checked_add(t, f);
  return t;
}

ClearingState state_from_flows(const FinancialNetwork& net, FlowAssignment flows) {
  ClearingState cs;
  cs.internal.assign(net.num_nodes(), 0);
  for (const auto& e : net.edges()) {
    cs.internal[index(e.dst)] = checked_add(cs.internal[index(e.dst)], flows[e.id]);
  }
  cs.assets.resize(net.num_nodes());
  for (std::size_t i = 0; i < net.num_nodes(); ++i) {
    cs.assets[i] = checked_add(net.nodes()[i].external, cs.internal[i]);
  }
  cs.flows = std::move(flows);
  return cs;
}

void check_consistent(const FinancialNetwork& net, const ClearingState& cs) {
  if (cs.assets.size() != net.num_nodes() || cs.internal.size() != net.num_nodes() ||
      cs.flows.flow.size() != net.num_edges()) {
    throw InconsistentStateError("clearing state dimensions do not match the network");
  }
  for (const auto& e : net.edges()) {
    const Money f = cs.flows[e.id];
    if (f < 0 || f > e.weight.amount()) {
      throw InconsistentStateError("flow on edge " + std::to_string(index(e.id)) + " outside [0, c(e)]");
    }
  }
  const ClearingState expected = state_from_flows(net, cs.flows);
  for (std::size_t i = 0; i < net.num_nodes(); ++i) {
    if (expected.internal[i] != cs.internal[i] || expected.assets[i] != cs.assets[i]) {
      std::ostringstream os;
      os << "node " << i << ": assets " << cs.assets[i] << " != external + inflow " << expected.assets[i];
      throw InconsistentStateError(os.str());
    }
  }
}

Money revenue(const FinancialNetwork& net, const ClearingState& cs) {
  check_consistent(net, cs);
  Money total = 0;
  for (Money a : cs.assets) total = checked_add(total, a);
  return total;
}

}  // namespace finclear
