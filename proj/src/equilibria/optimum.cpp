#include <algorithm>
#include <limits>

#include "finclear/equilibria.hpp"
#include "kernels.hpp"

namespace finclear {

namespace {

constexpr Money kInf = std::numeric_limits<Money>::max();

// Residual arc 2e is forward (cost -1), 2e+1 backward (cost +1).
Money residual(const CirculationNetwork& circ, const FlowAssignment& f, std::size_t arc) {
  const EdgeId e = edge_at(arc / 2);
  if (arc % 2 == 1) return f[e];
  const auto& cap = circ.edge(e).weight;
  return cap.is_unbounded() ? kInf : cap.amount() - f[e];
}

// Bellman-Ford from a virtual super-source; returns the arcs of a negative
// cycle found in canonical arc order, or an empty vector.
std::vector<std::size_t> find_negative_cycle(const CirculationNetwork& circ, const FlowAssignment& f) {
  const std::size_t n = circ.num_nodes();
  const std::size_t arcs = 2 * circ.num_edges();
  std::vector<Money> dist(n, 0);
  std::vector<std::size_t> pred(n, detail::kNoIndex);
  std::size_t last = detail::kNoIndex;
  for (std::size_t pass = 0; pass < n; ++pass) {
    last = detail::kNoIndex;
    for (std::size_t a = 0; a < arcs; ++a) {
      if (residual(circ, f, a) <= 0) continue;
      const auto& e = circ.edge(edge_at(a / 2));
      const bool fwd = a % 2 == 0;
      const std::size_t from = index(fwd ? e.src : e.dst);
      const std::size_t to = index(fwd ? e.dst : e.src);
      const Money cand = dist[from] + (fwd ? -1 : 1);
      if (cand < dist[to]) {
        dist[to] = cand;
        pred[to] = a;
        if (last == detail::kNoIndex) last = to;
      }
    }
    if (last == detail::kNoIndex) return {};
  }
  auto tail = [&](std::size_t a) {
    const auto& e = circ.edge(edge_at(a / 2));
    return index(a % 2 == 0 ? e.src : e.dst);
  };
  std::size_t x = last;
  for (std::size_t i = 0; i < n; ++i) x = tail(pred[x]);
  std::vector<std::size_t> cycle;
  std::size_t y = x;
  do {
    cycle.push_back(pred[y]);
    y = tail(pred[y]);
  } while (y != x);
  std::reverse(cycle.begin(), cycle.end());
  return cycle;
}

}  // namespace

FlowAssignment max_value_circulation(const CirculationNetwork& circ) {
  FlowAssignment f;
  f.flow.assign(circ.num_edges(), 0);
  while (true) {
    const auto cycle = find_negative_cycle(circ, f);
    if (cycle.empty()) return f;
    Money delta = kInf;
    for (std::size_t a : cycle) delta = std::min(delta, residual(circ, f, a));
    // Every residual cycle contains a bounded arc, so delta is finite.
    for (std::size_t a : cycle) {
      const EdgeId e = edge_at(a / 2);
      f[e] = a % 2 == 0 ? checked_add(f[e], delta) : f[e] - delta;
    }
  }
}

OptimalStrongEquilibrium optimal_strong_equilibrium(const FinancialNetwork& net) {
  require_valid(net);
  const auto circ = build_circulation_network(net);
  OptimalStrongEquilibrium out;
  out.circulation = max_value_circulation(circ);
  out.profile = StrategyProfile(net.num_nodes());
  for (std::size_t v = 0; v < net.num_nodes(); ++v) {
    const auto edges = net.out_edges(node_at(v));
    if (edges.empty()) continue;
    ThresholdRankingStrategy s{node_at(v), {edges.begin(), edges.end()}, {}};
    for (EdgeId e : edges) s.thresholds.push_back(out.circulation[e]);
    out.profile.set(std::move(s));
  }
  out.state = top_cycle_increase(net, out.profile);
  for (const auto& e : net.edges()) {
    if (out.state.flows[e.id] != out.circulation[e.id]) {
      throw std::logic_error("optimal strong equilibrium does not reproduce the optimal circulation");
    }
  }
  return out;
}

SocialOptimum social_optimum_edge_ranking(const FinancialNetwork& net, const SearchBudget& budget,
                                          Execution execution) {
  require_valid(net);
  BudgetTracker tracker(budget);
  SocialOptimum out;
  std::vector<StrategySpace> spaces;
  std::vector<std::size_t> radix;
  for (std::size_t v = 0; v < net.num_nodes(); ++v) {
    spaces.push_back(strategy_space(net, node_at(v), SearchSpace::EdgeRanking, tracker));
    if (!spaces.back().complete) out.exhaustive = false;
    radix.push_back(spaces.back().size());
  }
  const auto total = detail::product(radix);
  std::size_t count = total.value_or(std::numeric_limits<std::size_t>::max());
  if (count > tracker.remaining()) {
    count = tracker.remaining();
    out.exhaustive = false;
  }
  std::vector<Money> rev(count, -1);
  detail::for_each_index(count, execution, [&](std::size_t code) {
    if (!tracker.charge()) return;
    std::vector<std::size_t> digits;
    detail::decode(code, radix, digits);
    ScheduleTable table(net.num_nodes());
    for (std::size_t v = 0; v < net.num_nodes(); ++v) table[v] = &spaces[v].schedules[digits[v]];
    const auto cs = top_cycle_increase(net, table);
    Money r = 0;
    for (Money a : cs.assets) r += a;
    rev[code] = r;
  });
  std::size_t best = 0;
  for (std::size_t i = 0; i < count; ++i) {
    if (rev[i] < 0) out.exhaustive = false;
    if (rev[i] > rev[best]) best = i;
  }
  out.profile = StrategyProfile(net.num_nodes());
  if (count == 0) {
    out.revenue = net.total_external();
    out.profile = default_profile(net);
    return out;
  }
  std::vector<std::size_t> digits;
  detail::decode(best, radix, digits);
  for (std::size_t v = 0; v < net.num_nodes(); ++v) {
    if (spaces[v].strategies[digits[v]]) out.profile.set(*spaces[v].strategies[digits[v]]);
  }
  out.revenue = rev[best];
  return out;
}

namespace {

// Simple cycles of G' as edge lists, each listed once (smallest node first).
bool enumerate_cycles(const CirculationNetwork& circ, std::size_t max_len, BudgetTracker& budget,
                      std::vector<std::vector<EdgeId>>& out) {
  const std::size_t n = circ.num_nodes();
  std::vector<bool> on_path(n, false);
  std::vector<EdgeId> path;
  bool ok = true;
  auto dfs = [&](auto&& self, std::size_t start, std::size_t u) -> void {
    if (!ok) return;
    for (EdgeId e : circ.out_edges(node_at(u))) {
      const std::size_t w = index(circ.edge(e).dst);
      if (w < start) continue;
      if (circ.edge(e).weight.is_bounded() && circ.edge(e).weight.amount() == 0) continue;
      if (w == start) {
        path.push_back(e);
        out.push_back(path);
        path.pop_back();
        if (!budget.charge()) ok = false;
        continue;
      }
      if (on_path[w] || path.size() + 1 >= max_len) continue;
      on_path[w] = true;
      path.push_back(e);
      self(self, start, w);
      path.pop_back();
      on_path[w] = false;
    }
  };
  for (std::size_t s = 0; s < n && ok; ++s) {
    on_path[s] = true;
    dfs(dfs, s, s);
    on_path[s] = false;
  }
  return ok;
}

// Packs cycles (with multiplicity) within capacity to reach exactly `target`
// total length. Returns nullopt when the budget ran out.
std::optional<bool> pack_cycles(const std::vector<std::vector<EdgeId>>& cycles, std::vector<Money> cap,
                                Money target, BudgetTracker& budget) {
  const std::size_t k = cycles.size();
  // suffix_edges[i]: edges used by cycles i..k-1, for the capacity bound.
  std::vector<std::vector<EdgeId>> suffix_edges(k + 1);
  for (std::size_t i = k; i-- > 0;) {
    suffix_edges[i] = suffix_edges[i + 1];
    for (EdgeId e : cycles[i]) suffix_edges[i].push_back(e);
    std::sort(suffix_edges[i].begin(), suffix_edges[i].end());
    suffix_edges[i].erase(std::unique(suffix_edges[i].begin(), suffix_edges[i].end()), suffix_edges[i].end());
  }
  bool out_of_budget = false;
  auto dfs = [&](auto&& self, std::size_t i, Money total) -> bool {
    if (total == target) return true;
    if (i == k || out_of_budget) return false;
    if (!budget.charge()) {
      out_of_budget = true;
      return false;
    }
    Money bound = total;
    for (EdgeId e : suffix_edges[i]) bound += cap[index(e)];
    if (bound < target) return false;
    Money mult = std::numeric_limits<Money>::max();
    for (EdgeId e : cycles[i]) mult = std::min(mult, cap[index(e)]);
    const Money len = static_cast<Money>(cycles[i].size());
    mult = std::min(mult, (target - total) / len);
    for (Money m = mult; m >= 0; --m) {
      for (EdgeId e : cycles[i]) cap[index(e)] -= m;
      const bool hit = self(self, i + 1, total + m * len);
      for (EdgeId e : cycles[i]) cap[index(e)] += m;
      if (hit) return true;
      if (out_of_budget) return false;
    }
    return false;
  };
  const bool hit = dfs(dfs, 0, 0);
  if (out_of_budget) return std::nullopt;
  return hit;
}

}  // namespace

CycleBound min_max_cycle_d(const FinancialNetwork& net, const SearchBudget& budget) {
  require_valid(net);
  const auto circ = build_circulation_network(net);
  const auto fstar = max_value_circulation(circ);
  const Money target = fstar.total();
  if (target == 0) return {0, true};
  const std::size_t upper = decompose_circulation(circ, fstar).max_length();
  BudgetTracker tracker(budget);
  // Unbounded (v,s) edges never carry more than v's largest possible inflow.
  std::vector<Money> cap(circ.num_edges());
  for (const auto& e : circ.edges()) {
    if (e.weight.is_bounded()) {
      cap[index(e.id)] = e.weight.amount();
    } else {
      Money in = net.external(e.src);
      for (EdgeId x : net.in_edges(e.src)) in += net.weight(x);
      cap[index(e.id)] = in;
    }
  }
  std::vector<std::vector<EdgeId>> cycles;
  if (!enumerate_cycles(circ, upper, tracker, cycles)) return {upper, false};
  std::stable_sort(cycles.begin(), cycles.end(), [](const auto& a, const auto& b) { return a.size() < b.size(); });
  for (std::size_t L = 2; L < upper; ++L) {
    std::vector<std::vector<EdgeId>> shortc;
    for (const auto& c : cycles) {
      if (c.size() <= L) shortc.push_back(c);
    }
    if (shortc.empty()) continue;
    const auto hit = pack_cycles(shortc, cap, target, tracker);
    if (!hit) return {upper, false};
    if (*hit) return {L, true};
  }
  return {upper, true};
}

}  // namespace finclear
