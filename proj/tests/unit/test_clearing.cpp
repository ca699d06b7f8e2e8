#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

using namespace finclear;
using namespace testing_support;

namespace {

void check_fixed_point(const FinancialNetwork& net, const StrategyProfile& p, const ClearingState& cs) {
  const auto schedules = compile_profile(net, p);
  FlowAssignment f;
  f.flow.assign(net.num_edges(), 0);
  for (const auto& s : schedules) s.pay(cs.assets[index(s.owner)], f);
  CHECK(f == cs.flows);
  CHECK_NOTHROW(check_consistent(net, cs));
}

}  // namespace

TEST_CASE("no-nash game utility entries") {
  const auto net = gen_no_nash().net;
  auto cs = top_cycle_increase(net, no_nash_profile(net, true, true, true));
  CHECK(assets_of(net, cs, "v2") == 4);
  CHECK(assets_of(net, cs, "v3") == 4);
  cs = top_cycle_increase(net, no_nash_profile(net, true, false, true));
  CHECK(assets_of(net, cs, "v2") == 5);
  CHECK(assets_of(net, cs, "v3") == 2);
}

TEST_CASE("v9 inflow variant entries") {
  const auto net = gen_no_nash().net.with_external(node_at(8), 1);
  const auto cs = top_cycle_increase(net, no_nash_profile(net, true, true, true));
  CHECK(assets_of(net, cs, "v1") == 9);
  CHECK(assets_of(net, cs, "v2") == 4);
}

TEST_CASE("v9 inflow variant: v1 pays v7 first, v2 pays v6 first") {
  // Unique fixed point: v7 gets 4, so v3 collects 5 and forwards all of it to v1.
  const auto net = gen_no_nash().net.with_external(node_at(8), 1);
  const auto p = no_nash_profile(net, false, false, true);
  const auto top = kleene_clearing(net, p, KleeneStart::Top);
  CHECK(top == kleene_clearing(net, p, KleeneStart::Bottom));
  CHECK(top_cycle_increase(net, p) == top);
  CHECK(assets_of(net, top, "v1") == 5);
  CHECK(assets_of(net, top, "v2") == 4);
}

TEST_CASE("poa-unbounded profiles") {
  const auto net = gen_poa_unbounded();
  StrategyProfile ne(net.num_nodes());
  ne.set(EdgeRankingStrategy{node_at(0), {edge_at(0), edge_at(2)}});
  ne.set(EdgeRankingStrategy{node_at(1), {edge_at(1), edge_at(3)}});
  const auto cs = top_cycle_increase(net, ne);
  CHECK(cs.assets == std::vector<Money>{0, 0, 0, 0});

  StrategyProfile opt(net.num_nodes());
  opt.set(EdgeRankingStrategy{node_at(0), {edge_at(2), edge_at(0)}});
  opt.set(EdgeRankingStrategy{node_at(1), {edge_at(3), edge_at(1)}});
  const auto top = kleene_clearing(net, opt, KleeneStart::Top);
  CHECK(top.assets == std::vector<Money>{1, 1, 0, 0});
  CHECK(top_cycle_increase(net, opt) == top);
  CHECK(kleene_clearing(net, opt, KleeneStart::Bottom).assets == std::vector<Money>{0, 0, 0, 0});
}

TEST_CASE("acyclic network without external assets clears to zero") {
  NetworkBuilder b;
  const NodeId x = b.add_node("x");
  const NodeId y = b.add_node("y");
  const NodeId z = b.add_node("z");
  b.add_edge(x, y, 3);
  b.add_edge(y, z, 2);
  const auto net = b.build();
  const auto p = default_profile(net);
  CHECK(kleene_clearing(net, p, KleeneStart::Bottom).assets == std::vector<Money>{0, 0, 0});
  CHECK(top_cycle_increase(net, p).assets == std::vector<Money>{0, 0, 0});
}

TEST_CASE("missing and unsupported strategies") {
  const auto g = gen_no_nash();
  auto p = g.profile;
  p.clear(g.net.node_named("v2"));
  CHECK_THROWS_AS(top_cycle_increase(g.net, p), MissingStrategyError);
  p.set(ProRataStrategy{g.net.node_named("v2")});
  CHECK_THROWS_AS(top_cycle_increase(g.net, p), UnsupportedStrategyError);
}

TEST_CASE("top cycle increase respects the push bound") {
  std::mt19937_64 rng(base_seed() + 1);
  RandomNetworkParams params;
  for (int round = 0; round < 200; ++round) {
    const auto net = random_network(rng, params);
    const auto p = random_profile(net, rng, 0.5);
    ClearingStats stats;
    const auto cs = top_cycle_increase(net, p, CycleSelection::canonical(), &stats);
    CHECK(stats.pushes <= net.num_nodes() + 2 * net.num_edges() + 2);
    check_fixed_point(net, p, cs);
  }
}

TEST_CASE("lattice: top cycle increase equals the greatest fixed point") {
  std::mt19937_64 rng(base_seed() + 2);
  RandomNetworkParams params;
  for (int round = 0; round < 300; ++round) {
    const auto net = random_network(rng, params);
    const auto p = random_profile(net, rng, 0.5);
    const auto tci = top_cycle_increase(net, p);
    const auto top = kleene_clearing(net, p, KleeneStart::Top);
    const auto bottom = kleene_clearing(net, p, KleeneStart::Bottom);
    CHECK(tci == top);
    for (std::size_t v = 0; v < net.num_nodes(); ++v) CHECK(bottom.assets[v] <= tci.assets[v]);
    check_fixed_point(net, p, bottom);
  }
}

TEST_CASE("cycle selection does not change the result") {
  std::mt19937_64 rng(base_seed() + 3);
  RandomNetworkParams params;
  for (int round = 0; round < 100; ++round) {
    const auto net = random_network(rng, params);
    const auto p = random_profile(net, rng, 0.5);
    const auto canonical = top_cycle_increase(net, p);
    for (std::uint64_t s = 0; s < 5; ++s) CHECK(top_cycle_increase(net, p, CycleSelection::seeded(s)) == canonical);
  }
}

TEST_CASE("pro-rata clearing") {
  NetworkBuilder b;
  const NodeId u = b.add_node("u", 1);
  const NodeId v = b.add_node("v", 0);
  b.add_edge(u, v, 1);
  auto r = clear_pro_rata(b.build());
  CHECK(r.converged);
  CHECK(r.assets[0] == 1);
  CHECK(r.assets[1] == 1);

  b.add_edge(v, u, 1);
  r = clear_pro_rata(b.build());
  CHECK(r.converged);
  CHECK(r.assets[0] == 2);
  CHECK(r.assets[1] == 1);

  NetworkBuilder lone;
  lone.add_node("a", 3);
  lone.add_node("b", 0);
  r = clear_pro_rata(lone.build());
  CHECK(r.assets == std::vector<RationalMoney>{3, 0});
}

TEST_CASE("pro-rata reports non-convergence") {
  // A 2-cycle with unequal liabilities converges only in the limit.
  NetworkBuilder b;
  const NodeId u = b.add_node("u", 0);
  const NodeId v = b.add_node("v", 0);
  const NodeId w = b.add_node("w", 0);
  b.add_edge(u, v, 2);
  b.add_edge(v, u, 2);
  b.add_edge(v, w, 1);
  const auto net = b.build();
  const auto r = clear_pro_rata(net, 5);
  CHECK_FALSE(r.converged);
  CHECK(r.assets[0] > 0);
  CHECK(default_pro_rata_cap(net) > 0);
}
