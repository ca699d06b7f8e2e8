#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "finclear/strategies.hpp"

namespace finclear {

/// A network, a full default profile, and the firms with a real choice.
struct Game {
  FinancialNetwork net;
  StrategyProfile profile;
  std::vector<NodeId> strategic;
};

/// Nine firms v1..v9 (NodeIds 0..8), twelve edges, a^x_{v2} = a^x_{v3} = 2.
/// Edges in id order: (v1,v4) (v4,v5) (v5,v2) (v2,v1) (v2,v6) (v6,v2)
/// (v1,v7) (v7,v8) (v8,v3) (v3,v1) (v3,v9) (v9,v3).
Game gen_no_nash();

/// Central cycle v1..vd plus, for i = 2..d, a path v_i -> v_i^1 -> ... ->
/// v_i^{d-2} -> v_{i-1}. Unit weights, no external assets. Requires d >= 2.
FinancialNetwork gen_spoa_family(int d);

/// pi_i = ((v_i,v_{i+1}), (v_i,v_i^1)) for every firm on the central cycle.
StrategyProfile spoa_central_profile(const FinancialNetwork& net, int d);

/// Firms "1".."4"; edges e1=(1,3), e2=(2,4), e3=(1,2), e4=(2,1) as ids 0..3.
FinancialNetwork gen_poa_unbounded();

/// Cycle v1 -> ... -> vn -> v1 (ids 0..n-1) plus (v1,vn) (id n). Interior
/// weights M; (v1,v2), (vn,v1), (v1,vn) weigh M+1. Requires n >= 3, M >= 1.
FinancialNetwork gen_edge_spos_family(int n, Money M);

/// gen_no_nash plus w1, w2, w3 with (w1,w2) M, (w2,w3) M, (w3,w1) M-2,
/// (w1,v6) 2, (w2,v6) 2. Requires M >= 3.
FinancialNetwork gen_pos_unbounded(Money M, Money w1_external = 1);

class InvalidInstanceError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Literals are signed 1-based variable indices.
struct SatFormula {
  int num_vars = 0;
  std::vector<std::vector<int>> clauses;
};

void validate_formula(const SatFormula& f);

/// (x1 | x2 | !x3) & (x1 | !x2 | x4) & (x3 | !x4) & (x2 | !x3 | x4 | x5).
SatFormula five_variable_sat_example();

struct ReductionGame {
  FinancialNetwork net;
  StrategyProfile profile;  // covers every firm; v's entry is a placeholder
  NodeId v{};
};

/// Unit-weight gadget network in which v's best-response value equals
/// num_vars + MaxSAT(f).
ReductionGame gen_from_sat(const SatFormula& f);

/// Elements 0..num_elements-1; each triple holds three distinct elements.
struct ThreeDmInstance {
  int num_elements = 0;
  std::vector<std::array<int, 3>> triples;
};

void validate_3dm(const ThreeDmInstance& inst);

enum class ThreeDmVariant { BestResponse, Decision };

/// BestResponse: v -> u (3), u -> t (1), t -> v (1). Decision: no (t,v)
/// edges, a^x_v = |T|, and one no-Nash copy per element fed by (t_i, v9^i).
ReductionGame gen_from_3dm(const ThreeDmInstance& inst, ThreeDmVariant variant);

inline constexpr int kOracleCap = 20;

/// Exhaustive truth-table search; throws InvalidInstanceError beyond 20 variables.
int oracle_max_sat(const SatFormula& f);

/// Exhaustive subset search; throws InvalidInstanceError beyond 20 triples.
bool oracle_exact_cover(const ThreeDmInstance& inst);

struct RandomNetworkParams {
  int max_nodes = 6;
  int max_edges = 10;
  Money max_weight = 5;
  Money max_external = 3;
  double external_probability = 0.4;
  bool unit_weights = false;
};

FinancialNetwork random_network(std::mt19937_64& rng, const RandomNetworkParams& p);

/// Uniform ranking per firm; with probability `threshold_probability` a
/// threshold strategy with uniform thresholds instead.
StrategyProfile random_profile(const FinancialNetwork& net, std::mt19937_64& rng, double threshold_probability);

}  // namespace finclear
