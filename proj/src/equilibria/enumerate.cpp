#include <algorithm>
#include <map>
#include <memory>
#include <set>

#include "finclear/equilibria.hpp"
#include "kernels.hpp"

namespace finclear {

namespace {

// Strongly connected components in topological order (sources first).
std::vector<std::vector<NodeId>> components_in_order(const FinancialNetwork& net) {
  const std::size_t n = net.num_nodes();
  std::vector<std::size_t> idx(n, detail::kNoIndex), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::vector<NodeId>> comps;
  std::size_t counter = 0;
  auto strong = [&](auto&& self, std::size_t u) -> void {
    idx[u] = low[u] = counter++;
    stack.push_back(u);
    on_stack[u] = true;
    for (EdgeId e : net.out_edges(node_at(u))) {
      const std::size_t w = index(net.edge(e).dst);
      if (idx[w] == detail::kNoIndex) {
        self(self, w);
        low[u] = std::min(low[u], low[w]);
      } else if (on_stack[w]) {
        low[u] = std::min(low[u], idx[w]);
      }
    }
    if (low[u] != idx[u]) return;
    std::vector<NodeId> comp;
    std::size_t w;
    do {
      w = stack.back();
      stack.pop_back();
      on_stack[w] = false;
      comp.push_back(node_at(w));
    } while (w != u);
    std::sort(comp.begin(), comp.end());
    comps.push_back(std::move(comp));
  };
  for (std::size_t u = 0; u < n; ++u) {
    if (idx[u] == detail::kNoIndex) strong(strong, u);
  }
  // Tarjan emits sinks first.
  std::reverse(comps.begin(), comps.end());
  return comps;
}

bool insolvent(const FinancialNetwork& net, NodeId v, Money asset) { return asset < total_liabilities(net, v); }

// Profiles are digit vectors over firms; digit i indexes spaces[i].
StrategyProfile profile_of(const FinancialNetwork& net, const std::vector<StrategySpace>& spaces,
                           const std::vector<std::size_t>& digits) {
  StrategyProfile p(net.num_nodes());
  for (std::size_t v = 0; v < net.num_nodes(); ++v) {
    if (spaces[v].strategies[digits[v]]) p.set(*spaces[v].strategies[digits[v]]);
  }
  return p;
}

// Nash equilibria of one component given the flows entering it.
struct LocalResult {
  std::vector<std::vector<std::size_t>> digits;  // member digits, canonical order
  std::vector<std::vector<Money>> exit_flows;    // aligned with Component::exits
  bool complete = true;
};

struct Component {
  std::vector<NodeId> members;
  std::vector<EdgeId> entries;  // edges from earlier components into this one
  std::vector<EdgeId> exits;    // edges to later components
};

class Decomposer {
 public:
  Decomposer(const FinancialNetwork& net, const std::vector<StrategySpace>& spaces, BudgetTracker& budget,
             const EnumerateOptions& opts, SearchSpace space)
      : net_(net), spaces_(spaces), budget_(budget), opts_(opts), space_(space) {
    const auto comps = components_in_order(net);
    std::vector<std::size_t> comp_of(net.num_nodes());
    for (std::size_t c = 0; c < comps.size(); ++c) {
      for (NodeId v : comps[c]) comp_of[index(v)] = c;
    }
    comps_.resize(comps.size());
    for (std::size_t c = 0; c < comps.size(); ++c) comps_[c].members = comps[c];
    for (const auto& e : net.edges()) {
      const std::size_t a = comp_of[index(e.src)], b = comp_of[index(e.dst)];
      if (a == b) continue;
      comps_[a].exits.push_back(e.id);
      comps_[b].entries.push_back(e.id);
    }
    // crossing_[c]: edges from components before c into components at or after c.
    crossing_.resize(comps.size() + 1);
    for (std::size_t c = 0; c <= comps.size(); ++c) {
      for (const auto& e : net.edges()) {
        if (comp_of[index(e.src)] < c && comp_of[index(e.dst)] >= c) crossing_[c].push_back(e.id);
      }
    }
    memo_.resize(comps.size());
    flows_.flow.assign(net.num_edges(), 0);
    digits_.assign(net.num_nodes(), 0);
  }

  void run() { dfs(0); }

  std::vector<std::vector<std::size_t>> found;
  bool exhaustive = true;
  bool truncated = false;

 private:
  bool stop() const { return truncated || !exhaustive; }

  // Returns true if at least one equilibrium was found below this node.
  bool dfs(std::size_t c) {
    if (c == comps_.size()) {
      if (opts_.require_strong) {
        const auto p = profile_of(net_, spaces_, digits_);
        CheckOptions co;
        co.execution = opts_.execution;
        const auto rep = is_strong_equilibrium(net_, p, space_, budget_, co);
        if (!rep.exhaustive) exhaustive = false;
        if (rep.verdict != Verdict::Strong) return false;
      }
      found.push_back(digits_);
      if (opts_.max_results != 0 && found.size() >= opts_.max_results) truncated = true;
      return true;
    }
    std::vector<Money> key;
    for (EdgeId e : crossing_[c]) key.push_back(flows_[e]);
    if (!opts_.require_strong && failed_.count({c, key})) return false;

    std::vector<Money> inflow;
    for (EdgeId e : comps_[c].entries) inflow.push_back(flows_[e]);
    const LocalResult& local = solve(c, inflow);
    if (!local.complete) exhaustive = false;
    bool any = false;
    for (std::size_t r = 0; r < local.digits.size() && !stop(); ++r) {
      for (std::size_t j = 0; j < comps_[c].members.size(); ++j) {
        digits_[index(comps_[c].members[j])] = local.digits[r][j];
      }
      for (std::size_t x = 0; x < comps_[c].exits.size(); ++x) flows_[comps_[c].exits[x]] = local.exit_flows[r][x];
      any = dfs(c + 1) || any;
    }
    for (EdgeId e : comps_[c].exits) flows_[e] = 0;
    if (!any && !stop() && !opts_.require_strong) failed_.insert({c, key});
    return any;
  }

  const LocalResult& solve(std::size_t c, const std::vector<Money>& inflow) {
    auto it = memo_[c].find(inflow);
    if (it != memo_[c].end()) return *it->second;
    auto res = std::make_unique<LocalResult>();
    const Component& comp = comps_[c];

    // Subgame: members in order, then one sink collecting every exit edge.
    NetworkBuilder b;
    std::map<NodeId, NodeId> local_node;
    for (NodeId v : comp.members) local_node[v] = b.add_node(net_.label(v), net_.external(v));
    const NodeId sink = b.add_node("sink", 0);
    std::vector<Money> external(comp.members.size());
    for (std::size_t j = 0; j < comp.members.size(); ++j) external[j] = net_.external(comp.members[j]);
    for (std::size_t i = 0; i < comp.entries.size(); ++i) {
      const NodeId d = net_.edge(comp.entries[i]).dst;
      const auto j = std::lower_bound(comp.members.begin(), comp.members.end(), d) - comp.members.begin();
      external[j] = checked_add(external[j], inflow[i]);
    }
    for (std::size_t j = 0; j < comp.members.size(); ++j) b.set_external(node_at(j), external[j]);
    std::map<EdgeId, EdgeId> local_edge;
    for (NodeId v : comp.members) {
      for (EdgeId e : net_.out_edges(v)) {
        const auto& le = net_.edge(e);
        const auto dst = local_node.find(le.dst);
        local_edge[e] = b.add_edge(local_node.at(v), dst == local_node.end() ? sink : dst->second, le.weight);
      }
    }
    const FinancialNetwork sub = b.build();

    // Member spaces translated to local ids.
    std::vector<std::vector<Schedule>> local_sched(comp.members.size());
    std::vector<std::size_t> radix;
    for (std::size_t j = 0; j < comp.members.size(); ++j) {
      for (const auto& s : spaces_[index(comp.members[j])].schedules) {
        Schedule t{node_at(j), {}, s.total};
        for (const auto& seg : s.segments) t.segments.push_back({local_edge.at(seg.edge), seg.length});
        local_sched[j].push_back(std::move(t));
      }
      radix.push_back(local_sched[j].size());
    }
    const auto total = detail::product(radix);
    if (!total || *total > budget_.remaining()) {
      res->complete = false;
      return *memo_[c].emplace(inflow, std::move(res)).first->second;
    }
    std::vector<ClearingState> table(*total);
    std::vector<char> done(*total, 0);
    detail::for_each_index(*total, opts_.execution, [&](std::size_t code) {
      if (!budget_.charge()) return;
      std::vector<std::size_t> d;
      detail::decode(code, radix, d);
      ScheduleTable st(sub.num_nodes(), nullptr);
      for (std::size_t j = 0; j < d.size(); ++j) st[j] = &local_sched[j][d[j]];
      table[code] = top_cycle_increase(sub, st);
      done[code] = 1;
    });
    if (std::find(done.begin(), done.end(), 0) != done.end()) {
      res->complete = false;
      return *memo_[c].emplace(inflow, std::move(res)).first->second;
    }
    std::vector<std::size_t> stride(radix.size(), 1);
    for (std::size_t j = radix.size(); j-- > 1;) stride[j - 1] = stride[j] * radix[j];
    std::vector<std::size_t> d;
    for (std::size_t code = 0; code < *total; ++code) {
      detail::decode(code, radix, d);
      bool nash = true;
      for (std::size_t j = 0; j < d.size() && nash; ++j) {
        const Money a = table[code].assets[j];
        if (!insolvent(sub, node_at(j), a)) continue;
        const std::size_t base = code - d[j] * stride[j];
        for (std::size_t alt = 0; alt < radix[j] && nash; ++alt) {
          if (alt != d[j] && table[base + alt * stride[j]].assets[j] > a) nash = false;
        }
      }
      if (!nash) continue;
      res->digits.push_back(d);
      std::vector<Money> ex;
      for (EdgeId e : comp.exits) ex.push_back(table[code].flows[local_edge.at(e)]);
      res->exit_flows.push_back(std::move(ex));
    }
    return *memo_[c].emplace(inflow, std::move(res)).first->second;
  }

  const FinancialNetwork& net_;
  const std::vector<StrategySpace>& spaces_;
  BudgetTracker& budget_;
  const EnumerateOptions& opts_;
  SearchSpace space_;
  std::vector<Component> comps_;
  std::vector<std::vector<EdgeId>> crossing_;
  std::vector<std::map<std::vector<Money>, std::unique_ptr<LocalResult>>> memo_;
  std::set<std::pair<std::size_t, std::vector<Money>>> failed_;
  FlowAssignment flows_;
  std::vector<std::size_t> digits_;
};

// Reference: every profile of the full product, each alternative re-cleared.
void full_product(const FinancialNetwork& net, const std::vector<StrategySpace>& spaces, BudgetTracker& budget,
                  const EnumerateOptions& opts, SearchSpace space, std::vector<std::vector<std::size_t>>& found,
                  bool& exhaustive, bool& truncated) {
  std::vector<std::size_t> radix;
  for (const auto& sp : spaces) radix.push_back(sp.size());
  const auto total = detail::product(radix);
  if (!total) {
    exhaustive = false;
    return;
  }
  std::vector<char> verdict(*total, 0);  // 0 unknown, 1 Nash, 2 not Nash
  detail::for_each_index(*total, opts.execution, [&](std::size_t code) {
    if (!budget.charge()) return;
    std::vector<std::size_t> d;
    detail::decode(code, radix, d);
    ScheduleTable st(net.num_nodes());
    for (std::size_t v = 0; v < net.num_nodes(); ++v) st[v] = &spaces[v].schedules[d[v]];
    const auto base = top_cycle_increase(net, st);
    for (std::size_t v = 0; v < net.num_nodes(); ++v) {
      if (!insolvent(net, node_at(v), base.assets[v])) continue;
      for (std::size_t alt = 0; alt < radix[v]; ++alt) {
        if (alt == d[v]) continue;
        if (!budget.charge()) return;
        auto dev = st;
        dev[v] = &spaces[v].schedules[alt];
        if (top_cycle_increase(net, dev).assets[v] > base.assets[v]) {
          verdict[code] = 2;
          return;
        }
      }
    }
    verdict[code] = 1;
  });
  std::vector<std::size_t> d;
  for (std::size_t code = 0; code < *total; ++code) {
    if (verdict[code] == 0) {
      exhaustive = false;
      continue;
    }
    if (verdict[code] != 1) continue;
    detail::decode(code, radix, d);
    if (opts.require_strong) {
      CheckOptions co;
      co.execution = opts.execution;
      const auto rep = is_strong_equilibrium(net, profile_of(net, spaces, d), space, budget, co);
      if (!rep.exhaustive) exhaustive = false;
      if (rep.verdict != Verdict::Strong) continue;
    }
    found.push_back(d);
    if (opts.max_results != 0 && found.size() >= opts.max_results) {
      truncated = true;
      return;
    }
  }
}

}  // namespace

EnumerationResult enumerate_equilibria(const FinancialNetwork& net, SearchSpace space, const SearchBudget& budget,
                                       const EnumerateOptions& opts) {
  require_valid(net);
  BudgetTracker tracker(budget);
  EnumerationResult out;
  std::vector<StrategySpace> spaces;
  for (std::size_t v = 0; v < net.num_nodes(); ++v) {
    spaces.push_back(strategy_space(net, node_at(v), space, tracker));
    if (!spaces.back().complete) out.exhaustive = false;
  }
  std::vector<std::vector<std::size_t>> found;
  if (opts.route == EnumerationRoute::Decomposed) {
    Decomposer dec(net, spaces, tracker, opts, space);
    dec.run();
    found = std::move(dec.found);
    out.exhaustive = out.exhaustive && dec.exhaustive;
    out.truncated = dec.truncated;
  } else {
    bool exhaustive = true;
    full_product(net, spaces, tracker, opts, space, found, exhaustive, out.truncated);
    out.exhaustive = out.exhaustive && exhaustive;
  }
  std::sort(found.begin(), found.end());
  for (const auto& d : found) {
    Equilibrium eq;
    eq.profile = profile_of(net, spaces, d);
    eq.state = top_cycle_increase(net, eq.profile);
    eq.report.verdict = opts.require_strong ? Verdict::Strong : Verdict::Nash;
    eq.report.space = space;
    out.equilibria.push_back(std::move(eq));
  }
  return out;
}

}  // namespace finclear
