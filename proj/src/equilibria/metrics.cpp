#include <algorithm>

#include "finclear/equilibria.hpp"

namespace finclear {

Ratio welfare_ratio(Money opt, Money eq) {
  if (eq == 0) return opt == 0 ? Ratio(1, 1) : Ratio::unbounded();
  return Ratio(opt, eq);
}

WelfareMetrics welfare_metrics(const FinancialNetwork& net, SearchSpace space, const SearchBudget& budget) {
  require_valid(net);
  WelfareMetrics m;
  if (space == SearchSpace::ThresholdRanking) {
    const auto f = max_value_circulation(build_circulation_network(net));
    m.opt_revenue = f.total() - net.total_external();
  } else {
    const auto opt = social_optimum_edge_ranking(net, budget);
    m.opt_revenue = opt.revenue;
    m.exhaustive = opt.exhaustive;
  }
  const auto eqs = enumerate_equilibria(net, space, budget);
  if (!eqs.exhaustive) m.exhaustive = false;
  BudgetTracker tracker(budget);
  auto widen = [](std::optional<Money>& lo, std::optional<Money>& hi, Money r) {
    lo = lo ? std::min(*lo, r) : r;
    hi = hi ? std::max(*hi, r) : r;
  };
  for (const auto& eq : eqs.equilibria) {
    const Money r = revenue(net, eq.state);
    ++m.num_equilibria;
    widen(m.worst_eq_revenue, m.best_eq_revenue, r);
    const auto rep = is_strong_equilibrium(net, eq.profile, space, tracker);
    if (!rep.exhaustive) m.exhaustive = false;
    if (rep.verdict == Verdict::Strong) {
      ++m.num_strong;
      widen(m.worst_strong_revenue, m.best_strong_revenue, r);
    }
  }
  if (m.worst_eq_revenue) {
    m.poa = welfare_ratio(m.opt_revenue, *m.worst_eq_revenue);
    m.pos = welfare_ratio(m.opt_revenue, *m.best_eq_revenue);
  }
  if (m.worst_strong_revenue) {
    m.spoa = welfare_ratio(m.opt_revenue, *m.worst_strong_revenue);
    m.spos = welfare_ratio(m.opt_revenue, *m.best_strong_revenue);
  }
  m.d = min_max_cycle_d(net, budget);
  if (!m.d.exact) m.exhaustive = false;
  return m;
}

}  // namespace finclear
