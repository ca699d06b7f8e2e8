#include <algorithm>
#include <limits>
#include <map>

#include "finclear/equilibria.hpp"

namespace finclear {

namespace {

using ScheduleKey = std::vector<std::pair<std::uint32_t, Money>>;

ScheduleKey key_of(const Schedule& s) {
  ScheduleKey k;
  k.reserve(s.segments.size());
  for (const auto& seg : s.segments) k.emplace_back(static_cast<std::uint32_t>(seg.edge), seg.length);
  return k;
}

std::size_t saturating_mul(std::size_t a, std::size_t b) {
  if (a != 0 && b > std::numeric_limits<std::size_t>::max() / a) return std::numeric_limits<std::size_t>::max();
  return a * b;
}

}  // namespace

const char* to_string(SearchSpace s) { return s == SearchSpace::EdgeRanking ? "edge" : "threshold"; }

BudgetTracker::BudgetTracker(const SearchBudget& b)
    : budget_(b), deadline_(std::chrono::steady_clock::now() + b.timeout) {}

bool BudgetTracker::charge(std::size_t n) {
  if (exhausted()) return false;
  const std::size_t before = used_.fetch_add(n, std::memory_order_relaxed);
  if (before + n > budget_.max_candidates || std::chrono::steady_clock::now() > deadline_) {
    exhausted_.store(true, std::memory_order_relaxed);
    return false;
  }
  return true;
}

std::size_t BudgetTracker::remaining() const {
  const std::size_t u = used();
  return u >= budget_.max_candidates ? 0 : budget_.max_candidates - u;
}

std::optional<std::size_t> StrategySpace::find(const Schedule& s) const {
  for (std::size_t i = 0; i < schedules.size(); ++i) {
    if (schedules[i].segments == s.segments) return i;
  }
  return std::nullopt;
}

std::size_t raw_space_size(const FinancialNetwork& net, NodeId v, SearchSpace space) {
  const auto out = net.out_edges(v);
  std::size_t n = 1;
  for (std::size_t k = 2; k <= out.size(); ++k) n = saturating_mul(n, k);
  if (space == SearchSpace::ThresholdRanking) {
    for (EdgeId e : out) n = saturating_mul(n, static_cast<std::size_t>(net.weight(e)) + 1);
  }
  return n;
}

StrategySpace strategy_space(const FinancialNetwork& net, NodeId v, SearchSpace space, BudgetTracker& budget) {
  StrategySpace sp;
  sp.owner = v;
  const auto out = net.out_edges(v);
  if (out.empty()) {
    sp.strategies.emplace_back(std::nullopt);
    sp.schedules.push_back(Schedule{v, {}, 0});
    return sp;
  }
  std::map<ScheduleKey, std::size_t> seen;
  auto add = [&](Strategy s) {
    Schedule sched = compile_schedule(net, s);
    if (seen.emplace(key_of(sched), sp.schedules.size()).second) {
      sp.strategies.emplace_back(std::move(s));
      sp.schedules.push_back(std::move(sched));
    }
  };
  std::vector<EdgeId> perm(out.begin(), out.end());
  std::size_t generated = 0;
  auto keep_going = [&]() {
    if ((++generated & 4095u) == 0 && !budget.charge(0)) {
      sp.complete = false;
      return false;
    }
    return true;
  };
  do {
    if (space == SearchSpace::EdgeRanking) {
      add(EdgeRankingStrategy{v, perm});
      if (!keep_going()) return sp;
      continue;
    }
    // Odometer over thresholds indexed by ascending EdgeId; first edge most significant.
    std::vector<Money> tau(out.size(), 0);
    while (true) {
      ThresholdRankingStrategy s{v, perm, {}};
      for (EdgeId e : perm) {
        const auto pos = std::lower_bound(out.begin(), out.end(), e) - out.begin();
        s.thresholds.push_back(tau[pos]);
      }
      add(std::move(s));
      if (!keep_going()) return sp;
      std::size_t k = out.size();
      while (k > 0) {
        --k;
        if (tau[k] < net.weight(out[k])) {
          ++tau[k];
          break;
        }
        tau[k] = 0;
        if (k == 0) {
          k = out.size() + 1;
          break;
        }
      }
      if (k == out.size() + 1) break;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return sp;
}

StrategySpace strategy_space(const FinancialNetwork& net, NodeId v, SearchSpace space) {
  BudgetTracker unlimited(SearchBudget{std::numeric_limits<std::size_t>::max(), std::chrono::hours(24 * 365)});
  return strategy_space(net, v, space, unlimited);
}

}  // namespace finclear
