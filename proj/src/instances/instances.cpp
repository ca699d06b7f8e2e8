#include "finclear/instances.hpp"

#include <algorithm>
#include <bit>
#include <cstdlib>
#include <set>
#include <string>

namespace finclear {

namespace {

// No-nash game body on nine fresh nodes named v1..v9 with `suffix`; returns v1's id.
NodeId add_no_nash(NetworkBuilder& b, const std::string& suffix) {
  std::array<NodeId, 9> v{};
  for (int i = 0; i < 9; ++i) v[i] = b.add_node("v" + std::to_string(i + 1) + suffix, 0);
  auto E = [&](int s, int d, Money w) { b.add_edge(v[s - 1], v[d - 1], w); };
  E(1, 4, 4);
  E(4, 5, 4);
  E(5, 2, 2);
  E(2, 1, 6);
  E(2, 6, 6);
  E(6, 2, 1);
  E(1, 7, 4);
  E(7, 8, 4);
  E(8, 3, 2);
  E(3, 1, 6);
  E(3, 9, 6);
  E(9, 3, 1);
  b.set_external(v[1], 2);
  b.set_external(v[2], 2);
  return v[0];
}

std::vector<NodeId> multi_choice_firms(const FinancialNetwork& net) {
  std::vector<NodeId> out;
  for (std::size_t v = 0; v < net.num_nodes(); ++v) {
    if (net.out_edges(node_at(v)).size() > 1) out.push_back(node_at(v));
  }
  return out;
}

}  // namespace

Game gen_no_nash() {
  NetworkBuilder b;
  add_no_nash(b, "");
  Game g{b.build(), {}, {}};
  g.profile = default_profile(g.net);
  g.strategic = multi_choice_firms(g.net);
  return g;
}

FinancialNetwork gen_spoa_family(int d) {
  if (d < 2) throw InvalidInstanceError("spoa family needs d >= 2");
  NetworkBuilder b;
  std::vector<NodeId> c(d + 1);
  for (int i = 1; i <= d; ++i) c[i] = b.add_node("v" + std::to_string(i), 0);
  for (int i = 1; i <= d; ++i) b.add_edge(c[i], c[i % d + 1], 1);
  for (int i = 2; i <= d; ++i) {
    NodeId prev = c[i];
    for (int k = 1; k <= d - 2; ++k) {
      const NodeId p = b.add_node("v" + std::to_string(i) + "^" + std::to_string(k), 0);
      b.add_edge(prev, p, 1);
      prev = p;
    }
    b.add_edge(prev, c[i - 1], 1);
  }
  return b.build();
}

StrategyProfile spoa_central_profile(const FinancialNetwork& net, int d) {
  StrategyProfile p = default_profile(net);
  for (int i = 1; i <= d; ++i) {
    const NodeId v = net.node_named("v" + std::to_string(i));
    const EdgeId central = *net.find_edge(v, net.node_named("v" + std::to_string(i % d + 1)));
    std::vector<EdgeId> ranking{central};
    for (EdgeId e : net.out_edges(v)) {
      if (e != central) ranking.push_back(e);
    }
    p.set(EdgeRankingStrategy{v, ranking});
  }
  return p;
}

FinancialNetwork gen_poa_unbounded() {
  NetworkBuilder b;
  std::array<NodeId, 4> v{};
  for (int i = 0; i < 4; ++i) v[i] = b.add_node(std::to_string(i + 1), 0);
  b.add_edge(v[0], v[2], 1);
  b.add_edge(v[1], v[3], 1);
  b.add_edge(v[0], v[1], 1);
  b.add_edge(v[1], v[0], 1);
  return b.build();
}

FinancialNetwork gen_edge_spos_family(int n, Money M) {
  if (n < 3 || M < 1) throw InvalidInstanceError("edge spos family needs n >= 3 and M >= 1");
  NetworkBuilder b;
  std::vector<NodeId> v(n);
  for (int i = 0; i < n; ++i) v[i] = b.add_node("v" + std::to_string(i + 1), 0);
  for (int i = 0; i < n; ++i) {
    const bool heavy = i == 0 || i == n - 1;
    b.add_edge(v[i], v[(i + 1) % n], heavy ? M + 1 : M);
  }
  b.add_edge(v[0], v[n - 1], M + 1);
  return b.build();
}

FinancialNetwork gen_pos_unbounded(Money M, Money w1_external) {
  if (M < 3) throw InvalidInstanceError("pos family needs M >= 3");
  NetworkBuilder b;
  add_no_nash(b, "");
  const NodeId v6{5};
  const NodeId w1 = b.add_node("w1", w1_external);
  const NodeId w2 = b.add_node("w2", 0);
  const NodeId w3 = b.add_node("w3", 0);
  b.add_edge(w1, w2, M);
  b.add_edge(w2, w3, M);
  b.add_edge(w3, w1, M - 2);
  b.add_edge(w1, v6, 2);
  b.add_edge(w2, v6, 2);
  return b.build();
}

void validate_formula(const SatFormula& f) {
  if (f.num_vars < 1) throw InvalidInstanceError("formula needs at least one variable");
  if (f.clauses.empty()) throw InvalidInstanceError("formula needs at least one clause");
  for (const auto& c : f.clauses) {
    if (c.empty()) throw InvalidInstanceError("empty clause");
    for (int lit : c) {
      if (lit == 0 || std::abs(lit) > f.num_vars) throw InvalidInstanceError("literal out of range");
    }
  }
}

SatFormula five_variable_sat_example() {
  return {5, {{1, 2, -3}, {1, -2, 4}, {3, -4}, {2, -3, 4, 5}}};
}

ReductionGame gen_from_sat(const SatFormula& f) {
  validate_formula(f);
  const int n = f.num_vars;
  const int m = static_cast<int>(f.clauses.size());
  NetworkBuilder b;
  const NodeId v = b.add_node("v", 0);
  // x[i][bit][j], 0-based i and j.
  std::vector<std::array<std::vector<NodeId>, 2>> x(n);
  std::vector<NodeId> z(n);
  std::vector<std::array<NodeId, 2>> zb(n);
  for (int i = 0; i < n; ++i) {
    for (int bit = 0; bit < 2; ++bit) {
      for (int j = 0; j < m; ++j) {
        x[i][bit].push_back(b.add_node(
            "x" + std::to_string(i + 1) + "_" + std::to_string(j + 1) + "_" + std::to_string(bit), 0));
      }
    }
    z[i] = b.add_node("z" + std::to_string(i + 1), 0);
    for (int bit = 0; bit < 2; ++bit) {
      zb[i][bit] = b.add_node("z" + std::to_string(i + 1) + "_" + std::to_string(bit), 0);
    }
  }
  std::vector<NodeId> c(m);
  for (int j = 0; j < m; ++j) c[j] = b.add_node("c" + std::to_string(j + 1), 0);

  std::vector<std::vector<EdgeId>> first_choice(n * 2 * m);
  auto chain_slot = [&](int i, int bit, int j) -> std::vector<EdgeId>& { return first_choice[(i * 2 + bit) * m + j]; };
  for (int i = 0; i < n; ++i) {
    for (int bit = 0; bit < 2; ++bit) {
      for (int j = 0; j < m; ++j) b.add_edge(v, x[i][bit][j], 1);
      for (int j = 0; j + 1 < m; ++j) chain_slot(i, bit, j).push_back(b.add_edge(x[i][bit][j], x[i][bit][j + 1], 1));
      b.add_edge(v, zb[i][bit], 1);
      b.add_edge(zb[i][bit], x[i][bit][0], 1);
      chain_slot(i, bit, m - 1).push_back(b.add_edge(x[i][bit][m - 1], z[i], 1));
    }
    b.add_edge(z[i], v, 1);
  }
  for (int j = 0; j < m; ++j) {
    std::set<int> lits(f.clauses[j].begin(), f.clauses[j].end());
    for (int lit : lits) {
      const int i = std::abs(lit) - 1;
      b.add_edge(x[i][lit > 0 ? 1 : 0][j], c[j], 1);
    }
    b.add_edge(c[j], v, 1);
  }

  ReductionGame g{b.build(), {}, v};
  g.profile = default_profile(g.net);
  for (int i = 0; i < n; ++i) {
    for (int bit = 0; bit < 2; ++bit) {
      for (int j = 0; j < m; ++j) {
        const NodeId owner = x[i][bit][j];
        const EdgeId chain = chain_slot(i, bit, j).front();
        std::vector<EdgeId> ranking{chain};
        for (EdgeId e : g.net.out_edges(owner)) {
          if (e != chain) ranking.push_back(e);
        }
        g.profile.set(EdgeRankingStrategy{owner, ranking});
      }
    }
  }
  return g;
}

void validate_3dm(const ThreeDmInstance& inst) {
  if (inst.num_elements <= 0 || inst.num_elements % 3 != 0) {
    throw InvalidInstanceError("|T| must be a positive multiple of 3");
  }
  for (const auto& t : inst.triples) {
    for (int e : t) {
      if (e < 0 || e >= inst.num_elements) throw InvalidInstanceError("triple element outside T");
    }
    if (t[0] == t[1] || t[0] == t[2] || t[1] == t[2]) throw InvalidInstanceError("triple repeats an element");
  }
}

ReductionGame gen_from_3dm(const ThreeDmInstance& inst, ThreeDmVariant variant) {
  validate_3dm(inst);
  const int T = inst.num_elements;
  NetworkBuilder b;
  const NodeId v = b.add_node("v", variant == ThreeDmVariant::Decision ? T : 0);
  std::vector<NodeId> u;
  for (std::size_t k = 0; k < inst.triples.size(); ++k) u.push_back(b.add_node("u" + std::to_string(k + 1), 0));
  std::vector<NodeId> t;
  for (int i = 0; i < T; ++i) t.push_back(b.add_node("t" + std::to_string(i + 1), 0));
  for (NodeId uk : u) b.add_edge(v, uk, 3);
  for (std::size_t k = 0; k < inst.triples.size(); ++k) {
    std::array<int, 3> tr = inst.triples[k];
    std::sort(tr.begin(), tr.end());
    for (int e : tr) b.add_edge(u[k], t[e], 1);
  }
  if (variant == ThreeDmVariant::BestResponse) {
    for (NodeId ti : t) b.add_edge(ti, v, 1);
  } else {
    for (int i = 0; i < T; ++i) {
      const NodeId v1 = add_no_nash(b, "#" + std::to_string(i + 1));
      b.add_edge(t[i], node_at(index(v1) + 8), 1);
    }
  }
  ReductionGame g{b.build(), {}, v};
  g.profile = default_profile(g.net);
  return g;
}

int oracle_max_sat(const SatFormula& f) {
  validate_formula(f);
  if (f.num_vars > kOracleCap) throw InvalidInstanceError("MaxSAT oracle is capped at 20 variables");
  int best = 0;
  for (std::uint32_t mask = 0; mask < (1u << f.num_vars); ++mask) {
    int sat = 0;
    for (const auto& c : f.clauses) {
      sat += std::any_of(c.begin(), c.end(), [&](int lit) {
        const bool val = (mask >> (std::abs(lit) - 1)) & 1u;
        return lit > 0 ? val : !val;
      });
    }
    best = std::max(best, sat);
  }
  return best;
}

bool oracle_exact_cover(const ThreeDmInstance& inst) {
  validate_3dm(inst);
  const std::size_t u = inst.triples.size();
  if (u > static_cast<std::size_t>(kOracleCap)) throw InvalidInstanceError("exact-cover oracle is capped at 20 triples");
  const std::size_t k = static_cast<std::size_t>(inst.num_elements / 3);
  for (std::uint32_t mask = 0; mask < (1u << u); ++mask) {
    if (static_cast<std::size_t>(std::popcount(mask)) != k) continue;
    std::vector<bool> seen(inst.num_elements, false);
    bool ok = true;
    for (std::size_t i = 0; i < u && ok; ++i) {
      if (!((mask >> i) & 1u)) continue;
      for (int e : inst.triples[i]) {
        if (seen[e]) ok = false;
        seen[e] = true;
      }
    }
    if (ok) return true;
  }
  return false;
}

FinancialNetwork random_network(std::mt19937_64& rng, const RandomNetworkParams& p) {
  auto uni = [&](long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng); };
  const int n = static_cast<int>(uni(2, p.max_nodes));
  const int m = static_cast<int>(uni(1, p.max_edges));
  NetworkBuilder b;
  std::bernoulli_distribution has_ext(p.external_probability);
  for (int i = 0; i < n; ++i) {
    b.add_node("n" + std::to_string(i), has_ext(rng) ? uni(1, std::max<Money>(1, p.max_external)) : 0);
  }
  for (int k = 0; k < m; ++k) {
    const int s = static_cast<int>(uni(0, n - 1));
    int d = static_cast<int>(uni(0, n - 2));
    if (d >= s) ++d;
    b.add_edge(node_at(s), node_at(d), p.unit_weights ? 1 : uni(1, p.max_weight));
  }
  return b.build();
}

StrategyProfile random_profile(const FinancialNetwork& net, std::mt19937_64& rng, double threshold_probability) {
  StrategyProfile p(net.num_nodes());
  std::bernoulli_distribution use_threshold(threshold_probability);
  for (std::size_t v = 0; v < net.num_nodes(); ++v) {
    const auto out = net.out_edges(node_at(v));
    if (out.empty()) continue;
    std::vector<EdgeId> ranking(out.begin(), out.end());
    std::shuffle(ranking.begin(), ranking.end(), rng);
    if (use_threshold(rng)) {
      ThresholdRankingStrategy s{node_at(v), ranking, {}};
      for (EdgeId e : ranking) {
        s.thresholds.push_back(std::uniform_int_distribution<Money>(0, net.weight(e))(rng));
      }
      p.set(std::move(s));
    } else {
      p.set(EdgeRankingStrategy{node_at(v), ranking});
    }
  }
  return p;
}

}  // namespace finclear
