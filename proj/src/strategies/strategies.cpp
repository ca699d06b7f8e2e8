#include "finclear/strategies.hpp"

#include <algorithm>
#include <sstream>

namespace finclear {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_ranking(const FinancialNetwork& net, NodeId owner, const std::vector<EdgeId>& ranking) {
  if (!net.has_node(owner)) throw InvalidStrategyError("strategy owner is not a node");
  const auto out = net.out_edges(owner);
  std::vector<EdgeId> sorted = ranking;
  std::sort(sorted.begin(), sorted.end());
  if (!std::equal(sorted.begin(), sorted.end(), out.begin(), out.end())) {
    throw InvalidStrategyError("ranking of " + net.label(owner) + " is not a permutation of its outgoing edges");
  }
}

void append_segment(std::vector<Segment>& segs, EdgeId e, Money len) {
  if (len <= 0) return;
  if (!segs.empty() && segs.back().edge == e) {
    segs.back().length += len;
  } else {
    segs.push_back({e, len});
  }
}

PaymentVector schedule_payment(const FinancialNetwork& net, const Schedule& sched, Money y) {
  PaymentVector out;
  for (EdgeId e : net.out_edges(sched.owner)) out[e] = 0;
  Money left = std::max<Money>(y, 0);
  for (const auto& seg : sched.segments) {
    if (left == 0) break;
    const Money take = std::min(left, seg.length);
    out[seg.edge] += take;
    left -= take;
  }
  return out;
}

}  // namespace

Money ThresholdRankingStrategy::threshold_of(EdgeId e) const {
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    if (ranking[i] == e) return thresholds.at(i);
  }
  throw std::out_of_range("edge not ranked by this strategy");
}

NodeId owner_of(const Strategy& s) {
  return std::visit([](const auto& x) { return x.owner; }, s);
}

void validate_strategy(const FinancialNetwork& net, const Strategy& s) {
  std::visit(overloaded{
                 [&](const EdgeRankingStrategy& x) { check_ranking(net, x.owner, x.ranking); },
                 [&](const ThresholdRankingStrategy& x) {
                   check_ranking(net, x.owner, x.ranking);
                   if (x.thresholds.size() != x.ranking.size()) {
                     throw InvalidStrategyError("threshold vector does not match the ranking");
                   }
                   for (std::size_t i = 0; i < x.ranking.size(); ++i) {
                     if (x.thresholds[i] < 0 || x.thresholds[i] > net.weight(x.ranking[i])) {
                       throw InvalidStrategyError("threshold outside [0, c(e)] for firm " + net.label(x.owner));
                     }
                   }
                 },
                 [&](const ProRataStrategy& x) {
                   if (!net.has_node(x.owner)) throw InvalidStrategyError("strategy owner is not a node");
                 },
             },
             s);
}

const Strategy& StrategyProfile::at(NodeId v) const {
  if (!has(v)) throw std::out_of_range("no strategy for node " + std::to_string(index(v)));
  return *slots_[index(v)];
}

void StrategyProfile::set(Strategy s) {
  const NodeId v = owner_of(s);
  if (index(v) >= slots_.size()) slots_.resize(index(v) + 1);
  slots_[index(v)] = std::move(s);
}

StrategyProfile StrategyProfile::with(Strategy s) const {
  StrategyProfile copy = *this;
  copy.set(std::move(s));
  return copy;
}

StrategyProfile default_profile(const FinancialNetwork& net) {
  StrategyProfile p(net.num_nodes());
  for (std::size_t v = 0; v < net.num_nodes(); ++v) {
    const auto out = net.out_edges(node_at(v));
    if (out.empty()) continue;
    p.set(EdgeRankingStrategy{node_at(v), {out.begin(), out.end()}});
  }
  return p;
}

void validate_profile(const FinancialNetwork& net, const StrategyProfile& profile) {
  for (std::size_t v = 0; v < net.num_nodes(); ++v) {
    const NodeId id = node_at(v);
    if (!profile.has(id)) {
      if (!net.out_edges(id).empty()) {
        throw InvalidStrategyError("firm " + net.label(id) + " has outgoing edges but no strategy");
      }
      continue;
    }
    if (owner_of(profile.at(id)) != id) throw InvalidStrategyError("strategy stored under the wrong firm");
    validate_strategy(net, profile.at(id));
  }
  if (profile.size() > net.num_nodes()) {
    for (std::size_t v = net.num_nodes(); v < profile.size(); ++v) {
      if (profile.has(node_at(v))) throw InvalidStrategyError("strategy for a node outside the network");
    }
  }
}

EdgeRankingStrategy edge_ranking(const FinancialNetwork& net, NodeId owner, const std::vector<EdgeId>& ranking) {
  EdgeRankingStrategy s{owner, ranking};
  validate_strategy(net, s);
  return s;
}

std::string describe(const FinancialNetwork& net, const Strategy& s) {
  auto ranking_str = [&](const std::vector<EdgeId>& r) {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < r.size(); ++i) {
      const auto& e = net.edge(r[i]);
      os << (i ? "," : "") << "(" << net.label(e.src) << "," << net.label(e.dst) << ")";
    }
    os << ")";
    return os.str();
  };
  return std::visit(overloaded{
                        [&](const EdgeRankingStrategy& x) { return ranking_str(x.ranking); },
                        [&](const ThresholdRankingStrategy& x) {
                          std::ostringstream os;
                          os << ranking_str(x.ranking) << " tau=(";
                          for (std::size_t i = 0; i < x.thresholds.size(); ++i) {
                            os << (i ? "," : "") << x.thresholds[i];
                          }
                          os << ")";
                          return os.str();
                        },
                        [&](const ProRataStrategy&) { return std::string("pro-rata"); },
                    },
                    s);
}

Schedule compile_schedule(const FinancialNetwork& net, const Strategy& s) {
  validate_strategy(net, s);
  Schedule sched;
  sched.owner = owner_of(s);
  std::visit(overloaded{
                 [&](const EdgeRankingStrategy& x) {
                   for (EdgeId e : x.ranking) append_segment(sched.segments, e, net.weight(e));
                 },
                 [&](const ThresholdRankingStrategy& x) {
                   for (std::size_t i = 0; i < x.ranking.size(); ++i) {
                     append_segment(sched.segments, x.ranking[i], x.thresholds[i]);
                   }
                   for (std::size_t i = 0; i < x.ranking.size(); ++i) {
                     append_segment(sched.segments, x.ranking[i], net.weight(x.ranking[i]) - x.thresholds[i]);
                   }
                 },
                 [&](const ProRataStrategy&) {
                   throw UnsupportedStrategyError("pro-rata strategies have no ranking schedule");
                 },
             },
             s);
  for (const auto& seg : sched.segments) sched.total = checked_add(sched.total, seg.length);
  return sched;
}

void Schedule::pay(Money y, FlowAssignment& flows) const {
  Money left = std::max<Money>(y, 0);
  for (const auto& seg : segments) {
    if (left == 0) {
      // Later segments may revisit an edge already written; only zero it once.
      continue;
    }
    const Money take = std::min(left, seg.length);
    flows[seg.edge] += take;
    left -= take;
  }
}

PaymentVector edge_ranking_payment(const EdgeRankingStrategy& strat, const FinancialNetwork& net, Money y) {
  return schedule_payment(net, compile_schedule(net, strat), y);
}

PaymentVector threshold_ranking_payment(const ThresholdRankingStrategy& strat, const FinancialNetwork& net,
                                        Money y) {
  return schedule_payment(net, compile_schedule(net, strat), y);
}

std::map<EdgeId, RationalMoney> pro_rata_payment(const ProRataStrategy& strat, const FinancialNetwork& net,
                                                 const RationalMoney& y) {
  std::map<EdgeId, RationalMoney> out;
  const auto edges = net.out_edges(strat.owner);
  const Money liab = total_liabilities(net, strat.owner);
  if (liab == 0) {
    if (!edges.empty() && y > 0) {
      throw ProRataError("pro-rata payment for " + net.label(strat.owner) + " with zero total liabilities");
    }
    for (EdgeId e : edges) out[e] = 0;
    return out;
  }
  for (EdgeId e : edges) {
    const RationalMoney cap(net.weight(e));
    const RationalMoney share = y * cap / RationalMoney(liab);
    out[e] = share < cap ? share : cap;
  }
  return out;
}

SegmentCursor active_segment(const Schedule& schedule, Money paid_so_far) {
  SegmentCursor cur;
  cur.owner = schedule.owner;
  cur.paid_so_far = paid_so_far;
  Money start = 0;
  for (const auto& seg : schedule.segments) {
    const Money end = start + seg.length;
    if (paid_so_far < end) {
      cur.active_edge = seg.edge;
      cur.segment_remaining = Capacity(end - paid_so_far);
      return cur;
    }
    start = end;
  }
  cur.segment_remaining = Capacity::unbounded();
  return cur;
}

SegmentCursor active_segment(const EdgeRankingStrategy& strat, const FinancialNetwork& net, Money paid_so_far) {
  return active_segment(compile_schedule(net, strat), paid_so_far);
}

SegmentCursor active_segment(const ThresholdRankingStrategy& strat, const FinancialNetwork& net,
                             Money paid_so_far) {
  return active_segment(compile_schedule(net, strat), paid_so_far);
}

UnitExpansion expand_to_unit_edges(const FinancialNetwork& net, std::size_t cap) {
  require_valid(net);
  std::size_t total = 0;
  for (const auto& e : net.edges()) {
    total += static_cast<std::size_t>(e.weight.amount());
    if (total > cap) throw ExpansionTooLargeError("unit expansion exceeds " + std::to_string(cap) + " edges");
  }
  UnitExpansion out;
  std::vector<LiabilityEdge> edges;
  edges.reserve(total);
  out.origin.reserve(total);
  for (const auto& e : net.edges()) {
    for (Money k = 0; k < e.weight.amount(); ++k) {
      edges.push_back({edge_at(edges.size()), e.src, e.dst, Capacity(1)});
      out.origin.push_back(e.id);
    }
  }
  out.network = FinancialNetwork(net.nodes(), std::move(edges));
  return out;
}

ThresholdRankingStrategy threshold_from_flows(NodeId v, const FinancialNetwork& net, const ClearingState& cs,
                                              EdgeId unpaid_top) {
  check_consistent(net, cs);
  if (cs.asset(v) >= total_liabilities(net, v)) {
    throw std::invalid_argument("firm " + net.label(v) + " is solvent; any strategy reproduces the state");
  }
  const auto& top = net.edge(unpaid_top);
  if (top.src != v || cs.flows[unpaid_top] >= top.weight.amount()) {
    throw std::invalid_argument("unpaid_top must be an unsaturated outgoing edge of the firm");
  }
  ThresholdRankingStrategy s;
  s.owner = v;
  s.ranking.push_back(unpaid_top);
  for (EdgeId e : net.out_edges(v)) {
    if (e != unpaid_top) s.ranking.push_back(e);
  }
  for (EdgeId e : s.ranking) s.thresholds.push_back(cs.flows[e]);
  return s;
}

}  // namespace finclear
