#include <algorithm>

#include "finclear/equilibria.hpp"
#include "kernels.hpp"

namespace finclear {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Nash:
      return "Nash";
    case Verdict::NotNash:
      return "NotNash";
    case Verdict::Strong:
      return "Strong";
    case Verdict::NotStrong:
      return "NotStrong";
  }
  return "?";
}

namespace {

Money upper_bound_assets(const FinancialNetwork& net, NodeId v) {
  Money u = net.external(v);
  for (EdgeId e : net.in_edges(v)) u += net.weight(e);
  return u;
}

// Re-clears the deviation so before/after are the replayed values.
DeviationWitness make_witness(const FinancialNetwork& net, const StrategyProfile& profile, const ClearingState& base,
                              const std::map<NodeId, Strategy>& deviation) {
  DeviationWitness w;
  StrategyProfile dev = profile;
  for (const auto& [v, s] : deviation) {
    w.coalition.push_back(v);
    dev.set(s);
  }
  w.new_strategies = deviation;
  const auto after = top_cycle_increase(net, dev);
  for (NodeId v : w.coalition) {
    w.before.push_back(base.asset(v));
    w.after.push_back(after.asset(v));
  }
  return w;
}

}  // namespace

EquilibriumReport is_nash(const FinancialNetwork& net, const StrategyProfile& profile, SearchSpace space,
                          const SearchBudget& budget, const CheckOptions& opts) {
  BudgetTracker tracker(budget);
  return is_nash(net, profile, space, tracker, opts);
}

EquilibriumReport is_nash(const FinancialNetwork& net, const StrategyProfile& profile, SearchSpace space,
                          BudgetTracker& budget, const CheckOptions& opts) {
  require_valid(net);
  validate_profile(net, profile);
  EquilibriumReport rep;
  rep.space = space;
  const auto base = top_cycle_increase(net, profile);
  BestResponseOptions bro;
  bro.execution = opts.execution;
  for (std::size_t i = 0; i < net.num_nodes(); ++i) {
    const NodeId v = node_at(i);
    if (net.out_edges(v).empty() || base.asset(v) >= total_liabilities(net, v)) continue;
    const auto br = best_response_exact(net, profile, v, space, budget, bro);
    if (!br.exhaustive) rep.exhaustive = false;
    if (br.value > base.asset(v)) {
      rep.verdict = Verdict::NotNash;
      rep.witness = make_witness(net, profile, base, {{v, br.strategy}});
      return rep;
    }
  }
  return rep;
}

EquilibriumReport is_strong_equilibrium(const FinancialNetwork& net, const StrategyProfile& profile,
                                        SearchSpace space, const SearchBudget& budget, const CheckOptions& opts) {
  BudgetTracker tracker(budget);
  return is_strong_equilibrium(net, profile, space, tracker, opts);
}

EquilibriumReport is_strong_equilibrium(const FinancialNetwork& net, const StrategyProfile& profile,
                                        SearchSpace space, BudgetTracker& budget, const CheckOptions& opts) {
  auto rep = is_nash(net, profile, space, budget, opts);
  if (rep.verdict == Verdict::NotNash) {
    rep.verdict = Verdict::NotStrong;
    return rep;
  }
  rep.verdict = Verdict::Strong;
  const auto base = top_cycle_increase(net, profile);
  const auto schedules = compile_profile(net, profile);

  // Solvent firms, firms without a choice and firms at their asset ceiling
  // cannot strictly gain by changing strategy.
  struct Member {
    NodeId v;
    StrategySpace space;
    std::optional<std::size_t> current;
  };
  std::vector<Member> cand;
  for (std::size_t i = 0; i < net.num_nodes(); ++i) {
    const NodeId v = node_at(i);
    if (net.out_edges(v).empty() || base.asset(v) >= total_liabilities(net, v)) continue;
    if (base.asset(v) >= upper_bound_assets(net, v)) continue;
    auto sp = strategy_space(net, v, space, budget);
    if (!sp.complete) rep.exhaustive = false;
    if (sp.size() < 2) continue;
    const auto cur = sp.find(schedules[i]);
    cand.push_back({v, std::move(sp), cur});
  }
  const std::size_t k_max = opts.max_coalition == 0 ? cand.size() : std::min(opts.max_coalition, cand.size());
  if (k_max < cand.size()) rep.exhaustive = false;

  std::vector<std::size_t> pick;
  for (std::size_t k = 2; k <= k_max; ++k) {
    // Lexicographic k-subsets of the candidate list.
    pick.resize(k);
    for (std::size_t j = 0; j < k; ++j) pick[j] = j;
    while (true) {
      if (budget.exhausted()) {
        rep.exhaustive = false;
        return rep;
      }
      std::vector<std::size_t> radix;
      for (std::size_t j : pick) radix.push_back(cand[j].space.size() - (cand[j].current ? 1 : 0));
      const auto total = detail::product(radix);
      if (!total) {
        rep.exhaustive = false;
      } else {
        auto choice = [&](std::size_t j, std::size_t digit) {
          const auto& c = cand[pick[j]];
          return c.current && digit >= *c.current ? digit + 1 : digit;
        };
        bool complete = true;
        const auto hit = detail::find_first(*total, opts.execution, complete, [&](std::size_t code) -> std::optional<bool> {
          if (!budget.charge()) return std::nullopt;
          std::vector<std::size_t> digits;
          detail::decode(code, radix, digits);
          ScheduleTable table = schedule_table(schedules);
          for (std::size_t j = 0; j < pick.size(); ++j) {
            table[index(cand[pick[j]].v)] = &cand[pick[j]].space.schedules[choice(j, digits[j])];
          }
          const auto cs = top_cycle_increase(net, table);
          for (std::size_t j : pick) {
            if (cs.asset(cand[j].v) <= base.asset(cand[j].v)) return false;
          }
          return true;
        });
        if (!complete) rep.exhaustive = false;
        if (hit) {
          std::vector<std::size_t> digits;
          detail::decode(*hit, radix, digits);
          std::map<NodeId, Strategy> dev;
          for (std::size_t j = 0; j < pick.size(); ++j) {
            dev.emplace(cand[pick[j]].v, *cand[pick[j]].space.strategies[choice(j, digits[j])]);
          }
          rep.verdict = Verdict::NotStrong;
          rep.witness = make_witness(net, profile, base, dev);
          return rep;
        }
      }
      std::size_t j = k;
      while (j > 0 && pick[j - 1] == cand.size() - k + (j - 1)) --j;
      if (j == 0) break;
      ++pick[j - 1];
      for (std::size_t t = j; t < k; ++t) pick[t] = pick[t - 1] + 1;
    }
  }
  return rep;
}

}  // namespace finclear
