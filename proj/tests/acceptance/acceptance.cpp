// One PASS/FAIL line per acceptance criterion. Values are exact; the only
// tolerances are the wall-clock limits below.
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "support.hpp"

using namespace finclear;
using namespace testing_support;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) {
      pass = false;
      detail = what;
    }
  }
};

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;
  std::function<Outcome()> run;
};

std::string pair_str(Money a, Money b) { return "(" + std::to_string(a) + "," + std::to_string(b) + ")"; }

// Exhaustive search settings for every criterion.
const SearchBudget kBudget{5'000'000, std::chrono::seconds(120)};

Outcome utility_matrix() {
  Outcome out;
  const auto net = gen_no_nash().net;
  const NodeId v2 = net.node_named("v2"), v3 = net.node_named("v3");
  // (pi_v2, pi_v3): (v2,v1) first / (v2,v6) first crossed with (v3,v1) first / (v3,v9) first.
  const std::vector<std::pair<bool, bool>> cells = {{true, true}, {true, false}, {false, true}, {false, false}};
  const std::vector<std::pair<Money, Money>> expected = {{4, 4}, {4, 3}, {5, 2}, {3, 3}};
  std::string got;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto cs = top_cycle_increase(net, no_nash_profile(net, true, cells[i].first, cells[i].second));
    got += pair_str(cs.asset(v2), cs.asset(v3));
    out.require(cs.asset(v2) == expected[i].first && cs.asset(v3) == expected[i].second, "cells " + got);
  }
  if (out.pass) out.detail = "(a_v2,a_v3) = " + got;
  return out;
}

Outcome non_existence() {
  Outcome out;
  const auto r = enumerate_equilibria(gen_no_nash().net, SearchSpace::EdgeRanking, kBudget);
  out.require(r.exhaustive, "enumeration not exhaustive");
  out.require(r.equilibria.empty(), std::to_string(r.equilibria.size()) + " equilibria found");
  if (out.pass) out.detail = "0 equilibria over 8 profiles, exhaustive";
  return out;
}

Outcome stabilized_matrix() {
  Outcome out;
  const auto net = gen_no_nash().net.with_external(gen_no_nash().net.node_named("v9"), 1);
  const NodeId v1 = net.node_named("v1"), v2 = net.node_named("v2");
  // (pi_v1, pi_v2): (v1,v4) first / (v1,v7) first crossed with (v2,v1) first / (v2,v6) first.
  const std::vector<std::pair<bool, bool>> cells = {{true, true}, {true, false}, {false, true}, {false, false}};
  const std::vector<std::pair<Money, Money>> expected = {{9, 4}, {3, 5}, {9, 4}, {3, 4}};
  std::string got, mismatches;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto p = no_nash_profile(net, cells[i].first, cells[i].second, true);
    const auto cs = top_cycle_increase(net, p);
    got += pair_str(cs.asset(v1), cs.asset(v2));
    if (cs.asset(v1) != expected[i].first || cs.asset(v2) != expected[i].second) {
      // Report whether the state is the unique fixed point, so a wrong expectation is told apart from a bug.
      const bool unique = kleene_clearing(net, p, KleeneStart::Top) == kleene_clearing(net, p, KleeneStart::Bottom);
      mismatches += "; cell " + std::to_string(i + 1) + " expected " + pair_str(expected[i].first, expected[i].second) +
                    (unique ? " but the unique clearing state gives " : " but the maximal clearing state gives ") +
                    pair_str(cs.asset(v1), cs.asset(v2));
    }
  }
  out.require(mismatches.empty(), "cells " + got + mismatches);
  const auto rep = is_strong_equilibrium(net, no_nash_profile(net, false, true, true), SearchSpace::EdgeRanking, kBudget);
  const bool strong = rep.exhaustive && rep.verdict == Verdict::Strong;
  out.require(strong, std::string("profile verdict ") + to_string(rep.verdict));
  const std::string verdict = strong ? "profile Strong (exhaustive)" : "profile not verified Strong";
  out.detail = out.pass ? "(a_v1,a_v2) = " + got + ", " + verdict : out.detail + "; " + verdict;
  return out;
}

Outcome spoa_family() {
  Outcome out;
  std::string spoas;
  for (int d = 3; d <= 5; ++d) {
    const auto net = gen_spoa_family(d);
    const auto se = optimal_strong_equilibrium(net);
    out.require(revenue(net, se.state) == (d - 1) * d, "d=" + std::to_string(d) + ": opt SE revenue " +
                                                           std::to_string(revenue(net, se.state)));
    const auto p = spoa_central_profile(net, d);
    const auto rep = is_strong_equilibrium(net, p, SearchSpace::ThresholdRanking, kBudget);
    out.require(rep.exhaustive && rep.verdict == Verdict::Strong, "d=" + std::to_string(d) + ": central not Strong");
    out.require(revenue(net, top_cycle_increase(net, p)) == d, "d=" + std::to_string(d) + ": central revenue");
    const auto m = welfare_metrics(net, SearchSpace::ThresholdRanking, kBudget);
    out.require(m.exhaustive, "d=" + std::to_string(d) + ": metrics not exhaustive");
    out.require(m.spoa && *m.spoa == Ratio(d - 1, 1),
                "d=" + std::to_string(d) + ": spoa " + (m.spoa ? m.spoa->str() : std::string("none")));
    spoas += (spoas.empty() ? "" : ", ") + (m.spoa ? m.spoa->str() : std::string("none"));
  }
  if (out.pass) out.detail = "spoa for d=3,4,5: " + spoas;
  return out;
}

Outcome d_bound() {
  Outcome out;
  for (int d = 3; d <= 5; ++d) {
    const auto r = min_max_cycle_d(gen_spoa_family(d), kBudget);
    out.require(r.exact && r.d == static_cast<std::size_t>(d), "spoa_family(" + std::to_string(d) + ") d=" +
                                                                   std::to_string(r.d));
  }
  std::mt19937_64 rng(base_seed());
  RandomNetworkParams params;
  params.max_nodes = 6;
  params.max_edges = 10;
  params.unit_weights = true;
  std::size_t strong = 0;
  for (int i = 0; i < 50; ++i) {
    const auto net = random_network(rng, params);
    const Money opt = max_value_circulation(build_circulation_network(net)).total() - net.total_external();
    const auto cb = min_max_cycle_d(net, kBudget);
    out.require(cb.exact, "instance " + std::to_string(i) + ": d inexact");
    EnumerateOptions eo;
    eo.require_strong = true;
    const auto r = enumerate_equilibria(net, SearchSpace::ThresholdRanking, kBudget, eo);
    out.require(r.exhaustive, "instance " + std::to_string(i) + ": enumeration not exhaustive");
    for (const auto& eq : r.equilibria) {
      ++strong;
      const Money rev = revenue(net, eq.state);
      // Rev(SE) >= Rev(OPT)/d; with d = 0 there is no circulation and Rev(SE) = Rev(OPT).
      const bool ok = cb.d == 0 ? rev == opt : rev * static_cast<Money>(cb.d) >= opt;
      out.require(ok, "instance " + std::to_string(i) + ": Rev(SE)=" + std::to_string(rev) +
                          " opt=" + std::to_string(opt) + " d=" + std::to_string(cb.d));
    }
  }
  if (out.pass) out.detail = "d=3,4,5 exact; " + std::to_string(strong) + " strong equilibria on 50 instances satisfy the bound";
  return out;
}

Outcome poa_unbounded() {
  Outcome out;
  const auto net = gen_poa_unbounded();
  const auto m = welfare_metrics(net, SearchSpace::EdgeRanking, kBudget);
  out.require(m.exhaustive, "not exhaustive");
  out.require(m.worst_eq_revenue == Money{0}, "worst NE revenue " + (m.worst_eq_revenue ? std::to_string(*m.worst_eq_revenue) : "none"));
  out.require(m.opt_revenue == 2, "opt " + std::to_string(m.opt_revenue));
  out.require(m.poa && m.poa->is_unbounded(), "poa " + (m.poa ? m.poa->str() : std::string("none")));
  if (out.pass) out.detail = "worst NE 0, opt 2, poa = " + m.poa->str();
  return out;
}

Outcome edge_spos() {
  Outcome out;
  const auto net = gen_edge_spos_family(5, 10);
  const auto m = welfare_metrics(net, SearchSpace::EdgeRanking, kBudget);
  out.require(m.exhaustive, "not exhaustive");
  out.require(m.best_eq_revenue == Money{22} && m.worst_eq_revenue == Money{22}, "NE revenues differ from 22");
  out.require(m.opt_revenue == 50, "opt " + std::to_string(m.opt_revenue));
  out.require(m.spos && *m.spos == Ratio(50, 22), "spos " + (m.spos ? m.spos->str() : std::string("none")));
  if (out.pass) {
    out.detail = std::to_string(m.num_equilibria) + " NE, revenue 22, opt 50, spos = 50/22 = " + m.spos->str();
  }
  return out;
}

Outcome pos_unbounded() {
  Outcome out;
  std::vector<std::set<Money>> ne_revenues;
  std::vector<Money> opts;
  for (Money M : {10, 100}) {
    const auto net = gen_pos_unbounded(M);
    const auto r = enumerate_equilibria(net, SearchSpace::EdgeRanking, kBudget);
    out.require(r.exhaustive, "M=" + std::to_string(M) + ": enumeration not exhaustive");
    out.require(!r.equilibria.empty(), "M=" + std::to_string(M) + ": no pure NE");
    std::set<Money> revs;
    for (const auto& eq : r.equilibria) revs.insert(revenue(net, eq.state));
    ne_revenues.push_back(revs);
    const auto opt = social_optimum_edge_ranking(net, kBudget);
    out.require(opt.exhaustive, "M=" + std::to_string(M) + ": optimum not exhaustive");
    opts.push_back(opt.revenue);
  }
  out.require(ne_revenues[0] == ne_revenues[1], "NE revenue depends on M");
  out.require(opts[1] >= 5 * opts[0], "opt(100)=" + std::to_string(opts[1]) + " < 5*opt(10)=" + std::to_string(5 * opts[0]));
  if (out.pass) {
    std::ostringstream os;
    os << "NE revenues {";
    for (Money r : ne_revenues[0]) os << (r == *ne_revenues[0].begin() ? "" : ",") << r;
    os << "} for both M; opt(10)=" << opts[0] << ", opt(100)=" << opts[1];
    out.detail = os.str();
  }
  return out;
}

Outcome lattice() {
  Outcome out;
  std::mt19937_64 rng(base_seed() + 9);
  RandomNetworkParams params;
  params.max_nodes = 6;
  params.max_weight = 5;
  for (int i = 0; i < 500 && out.pass; ++i) {
    const auto net = random_network(rng, params);
    const auto p = random_profile(net, rng, 0.5);
    const auto tci = top_cycle_increase(net, p);
    const auto top = kleene_clearing(net, p, KleeneStart::Top);
    const auto bottom = kleene_clearing(net, p, KleeneStart::Bottom);
    out.require(tci == top, "instance " + std::to_string(i) + ": TopCycleIncrease differs from Kleene(Top)");
    for (std::size_t v = 0; v < net.num_nodes(); ++v) {
      out.require(bottom.assets[v] <= tci.assets[v], "instance " + std::to_string(i) + ": Bottom above Top");
    }
  }
  if (out.pass) out.detail = "500 instances: TopCycleIncrease == Kleene(Top), Kleene(Bottom) <= it";
  return out;
}

Outcome tie_break() {
  Outcome out;
  std::mt19937_64 rng(base_seed() + 10);
  for (int i = 0; i < 100 && out.pass; ++i) {
    const auto net = random_network(rng, {});
    const auto p = random_profile(net, rng, 0.5);
    const auto ref = top_cycle_increase(net, p);
    for (std::uint64_t s = 0; s < 10; ++s) {
      out.require(top_cycle_increase(net, p, CycleSelection::seeded(base_seed() + s)) == ref,
                  "instance " + std::to_string(i) + " seed " + std::to_string(s));
    }
  }
  if (out.pass) out.detail = "100 instances x 10 seeded cycle orders identical";
  return out;
}

Outcome solvent_and_threshold() {
  Outcome out;
  std::mt19937_64 rng(base_seed() + 11);
  std::size_t solvent_checks = 0, threshold_checks = 0;
  for (int i = 0; i < 200 && out.pass; ++i) {
    const auto net = random_network(rng, {});
    const auto p = random_profile(net, rng, 0.5);
    const auto ref = top_cycle_increase(net, p);
    for (std::size_t v = 0; v < net.num_nodes(); ++v) {
      const NodeId id = node_at(v);
      const auto out_edges = net.out_edges(id);
      if (out_edges.empty()) continue;
      if (ref.asset(id) >= total_liabilities(net, id)) {
        // Every ranking of a solvent firm, plus a random threshold strategy.
        std::vector<EdgeId> perm(out_edges.begin(), out_edges.end());
        do {
          out.require(top_cycle_increase(net, p.with(EdgeRankingStrategy{id, perm})) == ref,
                      "instance " + std::to_string(i) + ": solvent firm changed the state");
          ++solvent_checks;
        } while (std::next_permutation(perm.begin(), perm.end()));
        const auto q = random_profile(net, rng, 1.0);
        out.require(top_cycle_increase(net, p.with(q.at(id))) == ref,
                    "instance " + std::to_string(i) + ": solvent threshold changed the state");
      } else {
        // The top-ranked unpaid edge is where the firm's next coin would go.
        const auto cursor = active_segment(compile_schedule(net, p.at(id)), ref.asset(id));
        out.require(cursor.active_edge.has_value(), "instance " + std::to_string(i) + ": insolvent firm has no active edge");
        if (!cursor.active_edge) continue;
        const auto t = threshold_from_flows(id, net, ref, *cursor.active_edge);
        out.require(top_cycle_increase(net, p.with(t)) == ref,
                    "instance " + std::to_string(i) + ": threshold replacement changed the state");
        ++threshold_checks;
      }
    }
  }
  if (out.pass) {
    out.detail = std::to_string(solvent_checks) + " solvent permutations, " + std::to_string(threshold_checks) +
                 " threshold replacements, state unchanged";
  }
  return out;
}

Outcome sat_reduction() {
  Outcome out;
  std::mt19937_64 rng(base_seed() + 12);
  auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  std::vector<SatFormula> formulas;
  for (int i = 0; i < 50; ++i) {
    SatFormula f{uni(1, 3), {}};
    const int m = uni(1, 3);
    for (int j = 0; j < m; ++j) {
      std::vector<int> clause;
      const int len = uni(1, 3);
      for (int k = 0; k < len; ++k) clause.push_back(uni(1, f.num_vars) * (uni(0, 1) ? 1 : -1));
      f.clauses.push_back(clause);
    }
    formulas.push_back(f);
  }
  formulas.push_back(five_variable_sat_example());
  Money example_value = 0;
  for (std::size_t i = 0; i < formulas.size(); ++i) {
    const auto g = gen_from_sat(formulas[i]);
    const auto br = best_response_exact(g.net, g.profile, g.v, SearchSpace::EdgeRanking, kBudget);
    const Money expected = formulas[i].num_vars + oracle_max_sat(formulas[i]);
    out.require(br.exhaustive, "formula " + std::to_string(i) + ": search not exhaustive");
    out.require(br.value == expected, "formula " + std::to_string(i) + ": value " + std::to_string(br.value) +
                                          " expected " + std::to_string(expected));
    example_value = br.value;
  }
  if (out.pass) out.detail = "51 formulas exact; five-variable example value " + std::to_string(example_value);
  return out;
}

Outcome threedm_reduction() {
  Outcome out;
  const std::vector<ThreeDmInstance> cases = {
      {3, {{0, 1, 2}}},
      {6, {{0, 1, 2}, {3, 4, 5}}},
      {6, {{0, 1, 2}, {2, 3, 4}, {3, 4, 5}}},
      {6, {{0, 1, 2}, {2, 3, 4}}},
      {6, {{0, 1, 3}, {1, 2, 4}, {0, 2, 5}}},
      {9, {{0, 1, 2}, {2, 3, 4}, {5, 6, 7}, {6, 7, 8}}},
  };
  int solvable = 0;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const bool cover = oracle_exact_cover(cases[i]);
    solvable += cover;
    const auto br_game = gen_from_3dm(cases[i], ThreeDmVariant::BestResponse);
    const auto br = best_response_exact(br_game.net, br_game.profile, br_game.v, SearchSpace::EdgeRanking, kBudget);
    out.require(br.exhaustive, "instance " + std::to_string(i) + ": best response not exhaustive");
    out.require((br.value == cases[i].num_elements) == cover, "instance " + std::to_string(i) + ": value " +
                                                                  std::to_string(br.value));
    const auto dec = gen_from_3dm(cases[i], ThreeDmVariant::Decision);
    EnumerateOptions eo;
    eo.max_results = 1;
    const auto r = enumerate_equilibria(dec.net, SearchSpace::EdgeRanking, kBudget, eo);
    out.require(r.exhaustive, "instance " + std::to_string(i) + ": enumeration not exhaustive");
    out.require(r.equilibria.empty() != cover, "instance " + std::to_string(i) + ": NE existence mismatch");
  }
  out.require(solvable == 3, "expected 3 solvable instances, oracle says " + std::to_string(solvable));
  if (out.pass) out.detail = "6 instances (3 with cover): value 3k and NE existence match the oracle";
  return out;
}

Outcome optimality_identity() {
  Outcome out;
  std::mt19937_64 rng(base_seed() + 14);
  RandomNetworkParams params;
  params.max_nodes = 5;
  params.max_edges = 8;
  params.max_weight = 3;
  for (int i = 0; i < 100 && out.pass; ++i) {
    const auto net = random_network(rng, params);
    const auto se = optimal_strong_equilibrium(net);
    const Money rev = revenue(net, se.state);
    out.require(rev == se.circulation.total() - net.total_external(), "instance " + std::to_string(i) + ": identity");
    const auto rep = is_strong_equilibrium(net, se.profile, SearchSpace::ThresholdRanking, kBudget);
    out.require(rep.exhaustive, "instance " + std::to_string(i) + ": coalition check not exhaustive");
    out.require(rep.verdict == Verdict::Strong, "instance " + std::to_string(i) + ": not Strong");
  }
  if (out.pass) out.detail = "100 instances Strong (exhaustive coalitions), Rev = sum f* - sum a^x";
  return out;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "utility matrix of the no-nash game", 1, utility_matrix},
      {2, "no pure Nash equilibrium", 1, non_existence},
      {3, "stabilized game matrix and strong profile", 5, stabilized_matrix},
      {4, "spoa family", 30, spoa_family},
      {5, "d-bound", 60, d_bound},
      {6, "poa unbounded", 1, poa_unbounded},
      {7, "edge spos family", 1, edge_spos},
      {8, "pos unbounded family", 30, pos_unbounded},
      {9, "lattice and Kleene oracle", 60, lattice},
      {10, "cycle-selection invariance", 30, tie_break},
      {11, "solvent irrelevance and threshold sufficiency", 60, solvent_and_threshold},
      {12, "SAT reduction", 60, sat_reduction},
      {13, "3DM reduction", 60, threedm_reduction},
      {14, "strong-equilibrium optimality identity", 60, optimality_identity},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (o.pass && secs > c.limit_seconds) o = {false, "over time limit: " + o.detail};
    failed += !o.pass;
    std::printf("[%s] %2d %s: %s (%.2f s, limit %.0f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                secs, c.limit_seconds);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
