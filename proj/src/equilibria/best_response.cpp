#include <algorithm>
#include <map>
#include <set>

#include "finclear/equilibria.hpp"
#include "kernels.hpp"

namespace finclear {

namespace {

// Lexicographic order used for ties: ranking first, then thresholds by EdgeId.
std::vector<Money> order_key(const Strategy& s) {
  std::vector<Money> key;
  if (const auto* e = std::get_if<EdgeRankingStrategy>(&s)) {
    for (EdgeId x : e->ranking) key.push_back(static_cast<Money>(index(x)));
  } else if (const auto* t = std::get_if<ThresholdRankingStrategy>(&s)) {
    for (EdgeId x : t->ranking) key.push_back(static_cast<Money>(index(x)));
    std::vector<std::pair<EdgeId, Money>> by_edge;
    for (std::size_t i = 0; i < t->ranking.size(); ++i) by_edge.emplace_back(t->ranking[i], t->thresholds[i]);
    std::sort(by_edge.begin(), by_edge.end());
    for (const auto& [e, tau] : by_edge) key.push_back(tau);
  }
  return key;
}

class Evaluator {
 public:
  Evaluator(const FinancialNetwork& net, std::vector<Schedule> schedules, NodeId v)
      : net_(net), schedules_(std::move(schedules)), v_(v) {}

  Money value(const Schedule& candidate) const {
    ScheduleTable table = schedule_table(schedules_);
    table[index(v_)] = &candidate;
    return top_cycle_increase(net_, table).asset(v_);
  }

 private:
  const FinancialNetwork& net_;
  std::vector<Schedule> schedules_;
  NodeId v_;
};

struct Candidate {
  Strategy strategy;
  Money value;
};

// Keeps the best candidate; ties go to the smaller order key.
struct Incumbent {
  std::optional<Candidate> best;
  std::vector<Money> best_key;

  void offer(const Strategy& s, Money value) {
    if (best && value < best->value) return;
    auto key = order_key(s);
    if (best && value == best->value && key >= best_key) return;
    best = Candidate{s, value};
    best_key = std::move(key);
  }
};

class PrefixSearch {
 public:
  PrefixSearch(const FinancialNetwork& net, const Evaluator& eval, NodeId v, SearchSpace space, BudgetTracker& budget,
               Execution exec)
      : net_(net), eval_(eval), v_(v), space_(space), budget_(budget), exec_(exec) {
    for (EdgeId e : net.out_edges(v)) (net.weight(e) > 0 ? positive_ : zero_).push_back(e);
    upper_ = net.external(v);
    for (EdgeId e : net.in_edges(v)) upper_ += net.weight(e);
  }

  void run() {
    if (space_ == SearchSpace::EdgeRanking) {
      edge_dfs(std::vector<bool>(positive_.size(), false));
    } else {
      coin_dfs(std::vector<Money>(positive_.size(), 0));
    }
  }

  Incumbent incumbent;
  bool exhaustive = true;
  std::size_t evaluated = 0;

 private:
  bool done() const { return !exhaustive || (incumbent.best && incumbent.best->value >= upper_); }

  // Values of `cands` in order; -1 marks a candidate skipped for budget.
  std::vector<Money> evaluate(const std::vector<Strategy>& cands) {
    std::vector<Money> out(cands.size(), -1);
    std::vector<std::size_t> todo;
    std::vector<Schedule> scheds(cands.size());
    for (std::size_t i = 0; i < cands.size(); ++i) {
      scheds[i] = compile_schedule(net_, cands[i]);
      auto it = cache_.find(scheds[i].segments);
      if (it != cache_.end()) {
        out[i] = it->second;
      } else {
        todo.push_back(i);
      }
    }
    detail::for_each_index(todo.size(), exec_, [&](std::size_t k) {
      if (!budget_.charge()) return;
      out[todo[k]] = eval_.value(scheds[todo[k]]);
    });
    for (std::size_t i : todo) {
      if (out[i] < 0) {
        exhaustive = false;
        continue;
      }
      ++evaluated;
      cache_.emplace(scheds[i].segments, out[i]);
    }
    for (std::size_t i = 0; i < cands.size(); ++i) {
      if (out[i] >= 0) incumbent.offer(cands[i], out[i]);
    }
    return out;
  }

  void edge_dfs(const std::vector<bool>& in_f) {
    if (done() || !seen_sets_.insert(in_f).second) return;
    Money cap_f = 0;
    std::vector<EdgeId> prefix;
    for (std::size_t i = 0; i < positive_.size(); ++i) {
      if (in_f[i]) {
        prefix.push_back(positive_[i]);
        cap_f += net_.weight(positive_[i]);
      }
    }
    std::vector<std::size_t> next;
    std::vector<Strategy> cands;
    for (std::size_t i = 0; i < positive_.size(); ++i) {
      if (in_f[i]) continue;
      EdgeRankingStrategy s{v_, prefix};
      s.ranking.push_back(positive_[i]);
      for (std::size_t j = 0; j < positive_.size(); ++j) {
        if (!in_f[j] && j != i) s.ranking.push_back(positive_[j]);
      }
      s.ranking.insert(s.ranking.end(), zero_.begin(), zero_.end());
      next.push_back(i);
      cands.emplace_back(std::move(s));
    }
    const auto values = evaluate(cands);
    std::vector<std::pair<Money, std::size_t>> feasible;
    for (std::size_t k = 0; k < next.size(); ++k) {
      if (values[k] >= cap_f + net_.weight(positive_[next[k]])) feasible.emplace_back(values[k], next[k]);
    }
    std::stable_sort(feasible.begin(), feasible.end(), [](auto& a, auto& b) { return a.first > b.first; });
    for (const auto& [val, i] : feasible) {
      if (done()) return;
      auto child = in_f;
      child[i] = true;
      edge_dfs(child);
    }
  }

  void coin_dfs(const std::vector<Money>& paid) {
    if (done() || !seen_counts_.insert(paid).second) return;
    Money total = 0;
    for (Money k : paid) total += k;
    std::vector<std::size_t> next;
    std::vector<Strategy> cands;
    for (std::size_t i = 0; i < positive_.size(); ++i) {
      if (paid[i] >= net_.weight(positive_[i])) continue;
      ThresholdRankingStrategy s{v_, {positive_[i]}, {paid[i]}};
      for (std::size_t j = 0; j < positive_.size(); ++j) {
        if (j == i) continue;
        s.ranking.push_back(positive_[j]);
        s.thresholds.push_back(paid[j]);
      }
      for (EdgeId z : zero_) {
        s.ranking.push_back(z);
        s.thresholds.push_back(0);
      }
      next.push_back(i);
      cands.emplace_back(std::move(s));
    }
    const auto values = evaluate(cands);
    std::vector<std::pair<Money, std::size_t>> feasible;
    for (std::size_t k = 0; k < next.size(); ++k) {
      if (values[k] >= total + 1) feasible.emplace_back(values[k], next[k]);
    }
    std::stable_sort(feasible.begin(), feasible.end(), [](auto& a, auto& b) { return a.first > b.first; });
    for (const auto& [val, i] : feasible) {
      if (done()) return;
      auto child = paid;
      ++child[i];
      coin_dfs(child);
    }
  }

  const FinancialNetwork& net_;
  const Evaluator& eval_;
  NodeId v_;
  SearchSpace space_;
  BudgetTracker& budget_;
  Execution exec_;
  std::vector<EdgeId> positive_;
  std::vector<EdgeId> zero_;
  Money upper_ = 0;
  std::map<std::vector<Segment>, Money, bool (*)(const std::vector<Segment>&, const std::vector<Segment>&)> cache_{
      [](const std::vector<Segment>& a, const std::vector<Segment>& b) {
        return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), [](const Segment& x, const Segment& y) {
          return std::pair(index(x.edge), x.length) < std::pair(index(y.edge), y.length);
        });
      }};
  std::set<std::vector<bool>> seen_sets_;
  std::set<std::vector<Money>> seen_counts_;
};

}  // namespace

BestResponse best_response_exact(const FinancialNetwork& net, const StrategyProfile& profile, NodeId v,
                                 SearchSpace space, const SearchBudget& budget, const BestResponseOptions& opts) {
  BudgetTracker tracker(budget);
  return best_response_exact(net, profile, v, space, tracker, opts);
}

BestResponse best_response_exact(const FinancialNetwork& net, const StrategyProfile& profile, NodeId v,
                                 SearchSpace space, BudgetTracker& budget, const BestResponseOptions& opts) {
  require_valid(net);
  if (!net.has_node(v) || net.out_edges(v).empty()) {
    throw NoChoiceError("firm has no outgoing edges and therefore no strategy to choose");
  }
  StrategyProfile base = profile;
  if (!base.has(v)) base.set(default_profile(net).at(v));
  auto schedules = compile_profile(net, base);
  const Money current = top_cycle_increase(net, schedule_table(schedules)).asset(v);

  BestResponse out{base.at(v), current};
  if (current >= total_liabilities(net, v)) {
    out.already_solvent = true;
    return out;
  }
  const Evaluator eval(net, std::move(schedules), v);
  BestResponseRoute route = opts.route;
  if (route == BestResponseRoute::Auto) {
    route = raw_space_size(net, v, space) <= opts.enumerate_limit ? BestResponseRoute::Enumerate
                                                                   : BestResponseRoute::PrefixSearch;
  }
  out.route = route;

  Incumbent inc;
  if (route == BestResponseRoute::Enumerate) {
    const auto sp = strategy_space(net, v, space, budget);
    out.exhaustive = sp.complete;
    std::vector<Money> values(sp.size(), -1);
    detail::for_each_index(sp.size(), opts.execution, [&](std::size_t i) {
      if (!budget.charge()) return;
      values[i] = eval.value(sp.schedules[i]);
    });
    for (std::size_t i = 0; i < sp.size(); ++i) {
      if (values[i] < 0) {
        out.exhaustive = false;
        continue;
      }
      ++out.evaluated;
      // Canonical order already ascends, so a strict improvement suffices.
      if (!inc.best || values[i] > inc.best->value) inc.best = Candidate{*sp.strategies[i], values[i]};
    }
  } else {
    PrefixSearch search(net, eval, v, space, budget, opts.execution);
    search.run();
    inc = std::move(search.incumbent);
    out.exhaustive = search.exhaustive;
    out.evaluated = search.evaluated;
  }
  if (inc.best && inc.best->value > current) {
    out.strategy = inc.best->strategy;
    out.value = inc.best->value;
  } else if (inc.best && inc.best->value == current && out.exhaustive) {
    out.strategy = inc.best->strategy;
  }
  return out;
}

}  // namespace finclear
