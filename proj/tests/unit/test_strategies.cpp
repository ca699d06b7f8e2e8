#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

using namespace finclear;
using namespace testing_support;

namespace {

// Firm u with two edges of weights 4 and 6.
FinancialNetwork two_edges(Money a = 4, Money b = 6) {
  NetworkBuilder nb;
  const NodeId u = nb.add_node("u");
  const NodeId x = nb.add_node("x");
  const NodeId y = nb.add_node("y");
  nb.add_edge(u, x, a);
  nb.add_edge(u, y, b);
  return nb.build();
}

}  // namespace

TEST_CASE("edge ranking pays to saturation in order") {
  const auto net = two_edges();
  const EdgeRankingStrategy s{node_at(0), {edge_at(0), edge_at(1)}};
  CHECK(edge_ranking_payment(s, net, 7) == PaymentVector{{edge_at(0), 4}, {edge_at(1), 3}});
  CHECK(edge_ranking_payment(s, net, 0) == PaymentVector{{edge_at(0), 0}, {edge_at(1), 0}});
  CHECK(edge_ranking_payment(s, net, 100) == PaymentVector{{edge_at(0), 4}, {edge_at(1), 6}});
  const EdgeRankingStrategy rev{node_at(0), {edge_at(1), edge_at(0)}};
  CHECK(edge_ranking_payment(rev, net, 7) == PaymentVector{{edge_at(0), 1}, {edge_at(1), 6}});
}

TEST_CASE("threshold ranking pays thresholds first, then remainders") {
  const auto net = two_edges();
  const ThresholdRankingStrategy s{node_at(0), {edge_at(0), edge_at(1)}, {2, 5}};
  CHECK(threshold_ranking_payment(s, net, 7) == PaymentVector{{edge_at(0), 2}, {edge_at(1), 5}});
  CHECK(threshold_ranking_payment(s, net, 9) == PaymentVector{{edge_at(0), 4}, {edge_at(1), 5}});
  CHECK(threshold_ranking_payment(s, net, 10) == PaymentVector{{edge_at(0), 4}, {edge_at(1), 6}});
  CHECK(threshold_ranking_payment(s, net, 3) == PaymentVector{{edge_at(0), 2}, {edge_at(1), 1}});
}

TEST_CASE("threshold ranking with zero thresholds equals edge ranking") {
  const auto net = two_edges();
  const ThresholdRankingStrategy t{node_at(0), {edge_at(1), edge_at(0)}, {0, 0}};
  const EdgeRankingStrategy e{node_at(0), {edge_at(1), edge_at(0)}};
  for (Money y = 0; y <= 12; ++y) CHECK(threshold_ranking_payment(t, net, y) == edge_ranking_payment(e, net, y));
  CHECK(compile_schedule(net, t) == compile_schedule(net, e));
}

TEST_CASE("pro-rata is exact and capped") {
  const auto net = two_edges(4, 4);
  const ProRataStrategy s{node_at(0)};
  auto out = pro_rata_payment(s, net, 4);
  CHECK(out[edge_at(0)] == 2);
  CHECK(out[edge_at(1)] == 2);
  const auto uneven = two_edges(1, 2);
  out = pro_rata_payment(s, uneven, 1);
  CHECK(out[edge_at(0)] == RationalMoney(1, 3));
  CHECK(out[edge_at(1)] == RationalMoney(2, 3));
  out = pro_rata_payment(s, uneven, 10);
  CHECK(out[edge_at(0)] == 1);
  CHECK(out[edge_at(1)] == 2);
}

TEST_CASE("pro-rata with zero liabilities and positive assets is an error") {
  const auto net = two_edges(0, 0);
  CHECK_THROWS_AS(pro_rata_payment(ProRataStrategy{node_at(0)}, net, 1), ProRataError);
  CHECK_NOTHROW(pro_rata_payment(ProRataStrategy{node_at(0)}, net, 0));
}

TEST_CASE("invalid strategies are rejected") {
  const auto net = two_edges();
  CHECK_THROWS_AS(validate_strategy(net, EdgeRankingStrategy{node_at(0), {edge_at(0)}}), InvalidStrategyError);
  CHECK_THROWS_AS(validate_strategy(net, EdgeRankingStrategy{node_at(0), {edge_at(0), edge_at(0)}}),
                  InvalidStrategyError);
  CHECK_THROWS_AS(validate_strategy(net, ThresholdRankingStrategy{node_at(0), {edge_at(0), edge_at(1)}, {5, 0}}),
                  InvalidStrategyError);
  CHECK_THROWS_AS(validate_strategy(net, ThresholdRankingStrategy{node_at(0), {edge_at(0), edge_at(1)}, {-1, 0}}),
                  InvalidStrategyError);
}

TEST_CASE("active segment") {
  const auto net = two_edges();
  const ThresholdRankingStrategy t{node_at(0), {edge_at(0), edge_at(1)}, {2, 5}};
  auto cur = active_segment(t, net, 2);
  REQUIRE(cur.active_edge);
  CHECK(*cur.active_edge == edge_at(1));
  CHECK(cur.segment_remaining == Capacity(5));
  cur = active_segment(t, net, 0);
  CHECK(*cur.active_edge == edge_at(0));
  CHECK(cur.segment_remaining == Capacity(2));
  cur = active_segment(t, net, 10);
  CHECK_FALSE(cur.active_edge);
  CHECK(cur.segment_remaining.is_unbounded());
  const EdgeRankingStrategy e{node_at(0), {edge_at(1), edge_at(0)}};
  cur = active_segment(e, net, 3);
  CHECK(*cur.active_edge == edge_at(1));
  CHECK(cur.segment_remaining == Capacity(3));
}

TEST_CASE("zero-weight edges never become active") {
  const auto net = two_edges(0, 3);
  const EdgeRankingStrategy e{node_at(0), {edge_at(0), edge_at(1)}};
  const auto cur = active_segment(e, net, 0);
  CHECK(*cur.active_edge == edge_at(1));
}

TEST_CASE("unit expansion") {
  const auto net = gen_no_nash().net;
  const auto ex = expand_to_unit_edges(net);
  CHECK(ex.network.num_edges() == 46);
  CHECK(ex.origin.size() == 46);
  for (const auto& e : ex.network.edges()) {
    const auto& o = net.edge(ex.origin[index(e.id)]);
    CHECK(e.src == o.src);
    CHECK(e.dst == o.dst);
    CHECK(e.weight == Capacity(1));
  }
  CHECK_THROWS_AS(expand_to_unit_edges(net, 45), ExpansionTooLargeError);
}

TEST_CASE("edge ranking on the unit expansion reproduces coin schedules") {
  const auto net = two_edges(2, 1);
  const auto ex = expand_to_unit_edges(net);
  // Coin order: e0, e1, e0.
  const EdgeRankingStrategy unit{node_at(0), {edge_at(0), edge_at(2), edge_at(1)}};
  const ThresholdRankingStrategy thr{node_at(0), {edge_at(0), edge_at(1)}, {1, 1}};
  for (Money y = 0; y <= 3; ++y) {
    const auto u = edge_ranking_payment(unit, ex.network, y);
    PaymentVector folded{{edge_at(0), 0}, {edge_at(1), 0}};
    for (const auto& [e, amt] : u) folded[ex.origin[index(e)]] += amt;
    CHECK(folded == threshold_ranking_payment(thr, net, y));
  }
}

TEST_CASE("threshold_from_flows rejects solvent firms and saturated tops") {
  const auto g = gen_no_nash();
  const auto cs = top_cycle_increase(g.net, g.profile);
  // v4 has a single edge of weight 4 and receives at most 4.
  const NodeId v4 = g.net.node_named("v4");
  if (cs.asset(v4) >= total_liabilities(g.net, v4)) {
    CHECK_THROWS_AS(threshold_from_flows(v4, g.net, cs, g.net.out_edges(v4)[0]), std::invalid_argument);
  }
  const NodeId v2 = g.net.node_named("v2");
  CHECK_THROWS_AS(threshold_from_flows(v2, g.net, cs, g.net.out_edges(g.net.node_named("v1"))[0]),
                  std::invalid_argument);
}

TEST_CASE("describe renders edge names") {
  const auto g = gen_no_nash();
  const auto s = ranking(g.net, {{"v2", "v6"}, {"v2", "v1"}});
  CHECK(describe(g.net, s) == "((v2,v6),(v2,v1))");
}

TEST_CASE("profiles must cover firms with outgoing edges") {
  const auto g = gen_no_nash();
  auto p = g.profile;
  CHECK_NOTHROW(validate_profile(g.net, p));
  p.clear(g.net.node_named("v1"));
  CHECK_THROWS_AS(validate_profile(g.net, p), InvalidStrategyError);
}
