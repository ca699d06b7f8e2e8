#include "finclear/clearing.hpp"

#include <algorithm>
#include <bit>
#include <random>
#include <string>

namespace finclear {

namespace {

// Cursor over the segments of one node of the circulation network. Firms end
// in an unbounded (v,s) segment; the source ends with no active edge.
struct Cursor {
  std::size_t k = 0;
  Money used = 0;
};

class TopCycleRun {
 public:
  TopCycleRun(const FinancialNetwork& net, const ScheduleTable& schedules)
      : net_(net), sched_(schedules), n_(net.num_nodes()), cur_(n_ + 1), flows_(net.num_edges(), 0) {
    for (std::size_t v = 0; v < n_; ++v) {
      const Money x = net.external(node_at(v));
      if (x > 0) source_.push_back({static_cast<std::uint32_t>(v), x});
    }
  }

  ClearingState run(CycleSelection sel, ClearingStats* stats) {
    std::optional<std::mt19937_64> rng;
    if (sel.seed) rng.emplace(*sel.seed);
    std::size_t segments = source_.size();
    for (std::size_t v = 0; v < n_; ++v) {
      if (sched_[v]) segments += sched_[v]->segments.size();
    }
    // Each push closes at least one bounded segment.
    const std::size_t cap = segments + 1;
    std::size_t pushes = 0;
    std::vector<std::uint32_t> cycle;
    while (find_cycle(rng ? &*rng : nullptr, cycle)) {
      if (++pushes > cap) throw std::logic_error("top_cycle_increase exceeded its push bound");
      push(cycle);
    }
    if (stats) stats->pushes = pushes;
    FlowAssignment f;
    f.flow = std::move(flows_);
    return state_from_flows(net_, std::move(f));
  }

 private:
  static constexpr std::int64_t kNone = -1;

  struct SourceSeg {
    std::uint32_t target;
    Money length;
  };

  // Target node of u's active edge, or kNone.
  std::int64_t next(std::size_t u) const {
    if (u == n_) {
      return cur_[u].k < source_.size() ? static_cast<std::int64_t>(source_[cur_[u].k].target) : kNone;
    }
    const Schedule* s = sched_[u];
    if (s && cur_[u].k < s->segments.size()) return index(net_.edge(s->segments[cur_[u].k].edge).dst);
    return static_cast<std::int64_t>(n_);
  }

  // Remaining length of u's active segment; kNone when unbounded.
  Money remaining(std::size_t u) const {
    if (u == n_) return source_[cur_[u].k].length - cur_[u].used;
    const Schedule* s = sched_[u];
    if (s && cur_[u].k < s->segments.size()) return s->segments[cur_[u].k].length - cur_[u].used;
    return kNone;
  }

  bool find_cycle(std::mt19937_64* rng, std::vector<std::uint32_t>& cycle) {
    const std::size_t total = n_ + 1;
    color_.assign(total, 0);
    std::vector<std::vector<std::uint32_t>> found;
    std::vector<std::uint32_t> path;
    for (std::size_t start = 0; start < total; ++start) {
      if (color_[start]) continue;
      path.clear();
      std::int64_t u = static_cast<std::int64_t>(start);
      while (true) {
        color_[u] = 1;
        path.push_back(static_cast<std::uint32_t>(u));
        const std::int64_t t = next(static_cast<std::size_t>(u));
        if (t == kNone || color_[t] == 2) break;
        if (color_[t] == 1) {
          const auto it = std::find(path.begin(), path.end(), static_cast<std::uint32_t>(t));
          found.emplace_back(it, path.end());
          break;
        }
        u = t;
      }
      for (auto p : path) color_[p] = 2;
      if (!found.empty() && !rng) break;
    }
    if (found.empty()) return false;
    std::size_t pick = 0;
    if (rng) pick = std::uniform_int_distribution<std::size_t>(0, found.size() - 1)(*rng);
    cycle = std::move(found[pick]);
    return true;
  }

  void push(const std::vector<std::uint32_t>& cycle) {
    Money delta = kNone;
    for (auto u : cycle) {
      const Money r = remaining(u);
      if (r != kNone && (delta == kNone || r < delta)) delta = r;
    }
    if (delta <= 0) throw std::logic_error("cycle without a bounded segment");
    for (auto u : cycle) {
      Money len;
      if (u == n_) {
        len = source_[cur_[u].k].length;
      } else {
        const Schedule* s = sched_[u];
        if (!s || cur_[u].k >= s->segments.size()) continue;  // surplus on (u,s)
        const Segment& seg = s->segments[cur_[u].k];
        flows_[index(seg.edge)] += delta;
        len = seg.length;
      }
      cur_[u].used += delta;
      if (cur_[u].used == len) {
        ++cur_[u].k;
        cur_[u].used = 0;
      }
    }
  }

  const FinancialNetwork& net_;
  const ScheduleTable& sched_;
  std::size_t n_;
  std::vector<Cursor> cur_;
  std::vector<SourceSeg> source_;
  std::vector<Money> flows_;
  std::vector<std::uint8_t> color_;
};

}  // namespace

std::vector<Schedule> compile_profile(const FinancialNetwork& net, const StrategyProfile& profile) {
  std::vector<Schedule> out(net.num_nodes());
  for (std::size_t v = 0; v < net.num_nodes(); ++v) {
    const NodeId id = node_at(v);
    out[v].owner = id;
    if (!profile.has(id)) {
      if (!net.out_edges(id).empty()) {
        throw MissingStrategyError("firm " + net.label(id) + " has outgoing edges but no strategy");
      }
      continue;
    }
    if (owner_of(profile.at(id)) != id) throw InvalidStrategyError("strategy stored under the wrong firm");
    out[v] = compile_schedule(net, profile.at(id));
  }
  return out;
}

ScheduleTable schedule_table(const std::vector<Schedule>& schedules) {
  ScheduleTable t(schedules.size());
  for (std::size_t i = 0; i < schedules.size(); ++i) t[i] = &schedules[i];
  return t;
}

ClearingState top_cycle_increase(const FinancialNetwork& net, const StrategyProfile& profile, CycleSelection sel,
                                 ClearingStats* stats) {
  require_valid(net);
  const auto schedules = compile_profile(net, profile);
  return top_cycle_increase(net, schedule_table(schedules), sel, stats);
}

ClearingState top_cycle_increase(const FinancialNetwork& net, const ScheduleTable& schedules, CycleSelection sel,
                                 ClearingStats* stats) {
  if (schedules.size() != net.num_nodes()) throw std::invalid_argument("schedule table does not match the network");
  return TopCycleRun(net, schedules).run(sel, stats);
}

ClearingState kleene_clearing(const FinancialNetwork& net, const StrategyProfile& profile, KleeneStart start) {
  require_valid(net);
  const auto schedules = compile_profile(net, profile);
  const std::size_t n = net.num_nodes();
  std::vector<Money> a(n, 0);
  Money top_sum = 0;
  for (std::size_t v = 0; v < n; ++v) {
    Money top = net.external(node_at(v));
    for (EdgeId e : net.in_edges(node_at(v))) top = checked_add(top, net.weight(e));
    top_sum = checked_add(top_sum, top);
    if (start == KleeneStart::Top) a[v] = top;
  }
  // Monotone iterates move strictly towards the fixed point within [0, top].
  const Money cap = checked_add(top_sum, 2);
  FlowAssignment f;
  for (Money it = 0; it <= cap; ++it) {
    f.flow.assign(net.num_edges(), 0);
    for (std::size_t v = 0; v < n; ++v) schedules[v].pay(a[v], f);
    ClearingState cs = state_from_flows(net, f);
    if (cs.assets == a) return cs;
    a = cs.assets;
  }
  throw IterationCapError("kleene_clearing did not converge; strategy is not monotone");
}

std::size_t default_pro_rata_cap(const FinancialNetwork& net) {
  Money total = net.total_external();
  for (const auto& e : net.edges()) total = checked_add(total, e.weight.amount());
  const std::size_t bits = std::max<std::size_t>(1, std::bit_width(static_cast<std::uint64_t>(total)));
  return 10 * std::max<std::size_t>(1, net.num_nodes()) * bits;
}

ProRataClearing clear_pro_rata(const FinancialNetwork& net, std::optional<std::size_t> cap) {
  require_valid(net);
  const std::size_t n = net.num_nodes();
  const std::size_t limit = cap.value_or(default_pro_rata_cap(net));
  std::vector<Money> liab(n);
  ProRataClearing out;
  out.assets.resize(n);
  for (std::size_t v = 0; v < n; ++v) {
    liab[v] = total_liabilities(net, node_at(v));
    RationalMoney top = net.external(node_at(v));
    for (EdgeId e : net.in_edges(node_at(v))) top += net.weight(e);
    out.assets[v] = top;
  }
  out.flows.assign(net.num_edges(), 0);
  for (out.iterations = 0; out.iterations <= limit; ++out.iterations) {
    std::vector<RationalMoney> next(n);
    for (std::size_t v = 0; v < n; ++v) next[v] = net.external(node_at(v));
    for (const auto& e : net.edges()) {
      const std::size_t u = index(e.src);
      RationalMoney pay = 0;
      if (liab[u] > 0) {
        const RationalMoney c(e.weight.amount());
        pay = out.assets[u] * c / RationalMoney(liab[u]);
        if (pay > c) pay = c;
      }
      out.flows[index(e.id)] = pay;
      next[index(e.dst)] += pay;
    }
    if (next == out.assets) {
      out.converged = true;
      return out;
    }
    out.assets = std::move(next);
  }
  return out;
}

}  // namespace finclear
