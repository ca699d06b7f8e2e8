#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <map>
#include <optional>
#include <vector>

#include "finclear/circulation.hpp"
#include "finclear/clearing.hpp"

namespace finclear {

enum class SearchSpace { EdgeRanking, ThresholdRanking };

const char* to_string(SearchSpace s);

/// Parallel kernels use OpenMP; Serial runs the reference loop.
enum class Execution { Parallel, Serial };

struct SearchBudget {
  std::size_t max_candidates = 1'000'000;
  std::chrono::milliseconds timeout{60'000};
};

/// Shared, thread-safe candidate counter with a wall-clock deadline.
class BudgetTracker {
 public:
  explicit BudgetTracker(const SearchBudget& b);
  /// Accounts for `n` candidates; false once the budget is exhausted.
  bool charge(std::size_t n = 1);
  bool exhausted() const { return exhausted_.load(std::memory_order_relaxed); }
  std::size_t used() const { return used_.load(std::memory_order_relaxed); }
  std::size_t remaining() const;

 private:
  SearchBudget budget_;
  std::chrono::steady_clock::time_point deadline_;
  std::atomic<std::size_t> used_{0};
  std::atomic<bool> exhausted_{false};
};

/// Strategies of one firm in canonical order, one per distinct payment
/// schedule. Firms without outgoing edges have a single empty entry.
struct StrategySpace {
  NodeId owner{};
  std::vector<std::optional<Strategy>> strategies;
  std::vector<Schedule> schedules;
  bool complete = true;

  std::size_t size() const { return schedules.size(); }
  /// Index of the entry with the same schedule, if any.
  std::optional<std::size_t> find(const Schedule& s) const;
};

/// Upper bound on the raw (undeduplicated) space size; saturates at SIZE_MAX.
std::size_t raw_space_size(const FinancialNetwork& net, NodeId v, SearchSpace space);

/// Permutations in lexicographic EdgeId order; for thresholds, each
/// permutation combined with every threshold vector, lexicographic over
/// ascending EdgeId. Deduplicated by schedule.
StrategySpace strategy_space(const FinancialNetwork& net, NodeId v, SearchSpace space, BudgetTracker& budget);
StrategySpace strategy_space(const FinancialNetwork& net, NodeId v, SearchSpace space);

/// Integral circulation maximizing the sum of flows over all edges of G'.
FlowAssignment max_value_circulation(const CirculationNetwork& circ);

struct OptimalStrongEquilibrium {
  StrategyProfile profile;
  ClearingState state;
  FlowAssignment circulation;  // f* on G'
};

OptimalStrongEquilibrium optimal_strong_equilibrium(const FinancialNetwork& net);

enum class BestResponseRoute { Auto, Enumerate, PrefixSearch };

struct BestResponseOptions {
  BestResponseRoute route = BestResponseRoute::Auto;
  Execution execution = Execution::Parallel;
  /// Auto enumerates when the raw space is at most this large.
  std::size_t enumerate_limit = 5040;
};

struct BestResponse {
  Strategy strategy;
  Money value = 0;
  bool exhaustive = true;
  bool already_solvent = false;
  BestResponseRoute route = BestResponseRoute::Enumerate;
  std::size_t evaluated = 0;
};

class NoChoiceError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A maximizer of a_v over v's strategies with everything else fixed.
/// Throws NoChoiceError if v has no outgoing edges.
BestResponse best_response_exact(const FinancialNetwork& net, const StrategyProfile& profile, NodeId v,
                                 SearchSpace space, const SearchBudget& budget = {},
                                 const BestResponseOptions& opts = {});
BestResponse best_response_exact(const FinancialNetwork& net, const StrategyProfile& profile, NodeId v,
                                 SearchSpace space, BudgetTracker& budget, const BestResponseOptions& opts = {});

/// Every member strictly improves: after[i] > before[i].
struct DeviationWitness {
  std::vector<NodeId> coalition;
  std::map<NodeId, Strategy> new_strategies;
  std::vector<Money> before;
  std::vector<Money> after;
};

enum class Verdict { Nash, NotNash, Strong, NotStrong };

const char* to_string(Verdict v);

struct EquilibriumReport {
  Verdict verdict = Verdict::Nash;
  std::optional<DeviationWitness> witness;
  SearchSpace space = SearchSpace::EdgeRanking;
  bool exhaustive = true;
};

struct CheckOptions {
  Execution execution = Execution::Parallel;
  /// Largest coalition examined by is_strong_equilibrium; 0 means no limit.
  std::size_t max_coalition = 0;
};

EquilibriumReport is_nash(const FinancialNetwork& net, const StrategyProfile& profile, SearchSpace space,
                          const SearchBudget& budget = {}, const CheckOptions& opts = {});
EquilibriumReport is_nash(const FinancialNetwork& net, const StrategyProfile& profile, SearchSpace space,
                          BudgetTracker& budget, const CheckOptions& opts = {});

/// Coalitions of insolvent firms with a real choice, ascending by size then
/// lexicographically; every member changes strategy and strictly improves.
EquilibriumReport is_strong_equilibrium(const FinancialNetwork& net, const StrategyProfile& profile,
                                        SearchSpace space, const SearchBudget& budget = {},
                                        const CheckOptions& opts = {});
EquilibriumReport is_strong_equilibrium(const FinancialNetwork& net, const StrategyProfile& profile,
                                        SearchSpace space, BudgetTracker& budget, const CheckOptions& opts = {});

struct Equilibrium {
  StrategyProfile profile;
  ClearingState state;
  EquilibriumReport report;
};

enum class EnumerationRoute { Decomposed, FullProduct };

struct EnumerateOptions {
  bool require_strong = false;
  /// Stop after this many equilibria; 0 means all.
  std::size_t max_results = 0;
  EnumerationRoute route = EnumerationRoute::Decomposed;
  Execution execution = Execution::Parallel;
};

struct EnumerationResult {
  std::vector<Equilibrium> equilibria;
  bool exhaustive = true;  // false: budget ran out
  bool truncated = false;  // true: stopped at max_results
};

/// All pure Nash (or strong) equilibria, sorted canonically when complete.
EnumerationResult enumerate_equilibria(const FinancialNetwork& net, SearchSpace space,
                                       const SearchBudget& budget = {}, const EnumerateOptions& opts = {});

struct SocialOptimum {
  StrategyProfile profile;
  Money revenue = 0;
  bool exhaustive = true;
};

/// Maximum revenue over edge-ranking profiles; the canonically first maximizer.
SocialOptimum social_optimum_edge_ranking(const FinancialNetwork& net, const SearchBudget& budget = {},
                                          Execution execution = Execution::Parallel);

struct CycleBound {
  std::size_t d = 0;
  bool exact = true;
};

/// Smallest L such that some optimal circulation decomposes into cycles of
/// length at most L. Falls back to the canonical decomposition, inexact.
CycleBound min_max_cycle_d(const FinancialNetwork& net, const SearchBudget& budget = {});

/// opt / eq; unbounded when eq == 0 < opt, and 1 when both are 0.
Ratio welfare_ratio(Money opt, Money eq);

struct WelfareMetrics {
  Money opt_revenue = 0;
  std::optional<Money> best_eq_revenue;
  std::optional<Money> worst_eq_revenue;
  std::optional<Money> best_strong_revenue;
  std::optional<Money> worst_strong_revenue;
  std::optional<Ratio> poa;
  std::optional<Ratio> pos;
  std::optional<Ratio> spoa;
  std::optional<Ratio> spos;
  CycleBound d;
  std::size_t num_equilibria = 0;
  std::size_t num_strong = 0;
  bool exhaustive = true;
};

/// Opt from the circulation optimum (threshold space) or the edge-ranking
/// social optimum (edge space); extremes from enumerate_equilibria.
WelfareMetrics welfare_metrics(const FinancialNetwork& net, SearchSpace space, const SearchBudget& budget = {});

}  // namespace finclear
