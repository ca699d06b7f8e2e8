#pragma once

#include <cstdint>
#include <cstdlib>
#include <initializer_list>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "finclear/finclear.hpp"

namespace testing_support {

using namespace finclear;

/// FINCLEAR_SEED overrides the default seed of every randomized suite.
inline std::uint64_t base_seed(std::uint64_t fallback = 20241015) {
  if (const char* s = std::getenv("FINCLEAR_SEED")) return std::strtoull(s, nullptr, 10);
  return fallback;
}

/// Edge ranking from ("src","dst") name pairs.
inline EdgeRankingStrategy ranking(const FinancialNetwork& net,
                                   std::initializer_list<std::pair<const char*, const char*>> edges) {
  std::vector<EdgeId> r;
  for (const auto& [s, d] : edges) r.push_back(net.edge_between(s, d));
  return edge_ranking(net, net.edge(r.front()).src, r);
}

inline Money assets_of(const FinancialNetwork& net, const ClearingState& cs, const char* name) {
  return cs.asset(net.node_named(name));
}

/// No-nash game profile for v1, v2, v3; the other firms keep their single edge.
inline StrategyProfile no_nash_profile(const FinancialNetwork& net, bool v1_v4_first, bool v2_v1_first,
                                       bool v3_v1_first) {
  StrategyProfile p = default_profile(net);
  p.set(v1_v4_first ? ranking(net, {{"v1", "v4"}, {"v1", "v7"}}) : ranking(net, {{"v1", "v7"}, {"v1", "v4"}}));
  p.set(v2_v1_first ? ranking(net, {{"v2", "v1"}, {"v2", "v6"}}) : ranking(net, {{"v2", "v6"}, {"v2", "v1"}}));
  p.set(v3_v1_first ? ranking(net, {{"v3", "v1"}, {"v3", "v9"}}) : ranking(net, {{"v3", "v9"}, {"v3", "v1"}}));
  return p;
}

}  // namespace testing_support
