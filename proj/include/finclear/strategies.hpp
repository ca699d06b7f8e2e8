#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "finclear/network.hpp"

namespace finclear {

using RationalMoney = boost::multiprecision::cpp_rational;

/// Pays ranked edges to saturation in order.
struct EdgeRankingStrategy {
  NodeId owner{};
  std::vector<EdgeId> ranking;
  friend bool operator==(const EdgeRankingStrategy&, const EdgeRankingStrategy&) = default;
};

/// Two passes over the ranking: first thresholds[i] on ranking[i], then the
/// remaining c(e) - thresholds[i]. `thresholds` is aligned with `ranking`.
struct ThresholdRankingStrategy {
  NodeId owner{};
  std::vector<EdgeId> ranking;
  std::vector<Money> thresholds;

  Money threshold_of(EdgeId e) const;
  friend bool operator==(const ThresholdRankingStrategy&, const ThresholdRankingStrategy&) = default;
};

struct ProRataStrategy {
  NodeId owner{};
  friend bool operator==(const ProRataStrategy&, const ProRataStrategy&) = default;
};

using Strategy = std::variant<EdgeRankingStrategy, ThresholdRankingStrategy, ProRataStrategy>;

NodeId owner_of(const Strategy& s);

class InvalidStrategyError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Checks the ranking is a permutation of E+(owner) and thresholds lie in [0, c(e)].
void validate_strategy(const FinancialNetwork& net, const Strategy& s);

/// Per-firm strategy assignment, indexed by NodeId.
class StrategyProfile {
 public:
  StrategyProfile() = default;
  explicit StrategyProfile(std::size_t num_nodes) : slots_(num_nodes) {}

  std::size_t size() const { return slots_.size(); }
  bool has(NodeId v) const { return index(v) < slots_.size() && slots_[index(v)].has_value(); }
  const Strategy& at(NodeId v) const;
  const std::optional<Strategy>& slot(NodeId v) const { return slots_.at(index(v)); }
  void set(Strategy s);
  void clear(NodeId v) { slots_.at(index(v)).reset(); }
  StrategyProfile with(Strategy s) const;

  friend bool operator==(const StrategyProfile&, const StrategyProfile&) = default;

 private:
  std::vector<std::optional<Strategy>> slots_;
};

/// Edge ranking in ascending EdgeId order for every firm with outgoing edges.
StrategyProfile default_profile(const FinancialNetwork& net);

/// Every strategy validates and every firm with outgoing edges has one.
void validate_profile(const FinancialNetwork& net, const StrategyProfile& profile);

EdgeRankingStrategy edge_ranking(const FinancialNetwork& net, NodeId owner, const std::vector<EdgeId>& ranking);

/// "((v2,v6),(v2,v1))" style rendering; thresholds appended as "τ=(..)".
std::string describe(const FinancialNetwork& net, const Strategy& s);

using PaymentVector = std::map<EdgeId, Money>;

PaymentVector edge_ranking_payment(const EdgeRankingStrategy& strat, const FinancialNetwork& net, Money y);
PaymentVector threshold_ranking_payment(const ThresholdRankingStrategy& strat, const FinancialNetwork& net, Money y);

class ProRataError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// f_e(y) = min{c(e), y c(e) / l(v)} exactly. Throws ProRataError when the
/// owner has outgoing edges, l(v) = 0, and y > 0.
std::map<EdgeId, RationalMoney> pro_rata_payment(const ProRataStrategy& strat, const FinancialNetwork& net,
                                                 const RationalMoney& y);

/// One contiguous run of coins paid to a single edge.
struct Segment {
  EdgeId edge{};
  Money length = 0;
  friend bool operator==(const Segment&, const Segment&) = default;
};

/// The coin sequence of a ranking strategy as maximal runs per edge. Two
/// strategies pay identically for every y iff their schedules are equal.
struct Schedule {
  NodeId owner{};
  std::vector<Segment> segments;
  Money total = 0;  // l(owner)

  /// Writes f_e(y) for the owner's edges into `flows`.
  void pay(Money y, FlowAssignment& flows) const;
  friend bool operator==(const Schedule&, const Schedule&) = default;
};

class UnsupportedStrategyError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Throws UnsupportedStrategyError for pro-rata strategies.
Schedule compile_schedule(const FinancialNetwork& net, const Strategy& s);

/// Where the next coin goes after `paid_so_far` coins.
struct SegmentCursor {
  NodeId owner{};
  Money paid_so_far = 0;
  std::optional<EdgeId> active_edge;  // nullopt: liabilities exhausted, surplus goes to (owner,s)
  Capacity segment_remaining;         // unbounded iff active_edge is nullopt
};

SegmentCursor active_segment(const Schedule& schedule, Money paid_so_far);
SegmentCursor active_segment(const EdgeRankingStrategy& strat, const FinancialNetwork& net, Money paid_so_far);
SegmentCursor active_segment(const ThresholdRankingStrategy& strat, const FinancialNetwork& net,
                             Money paid_so_far);

class ExpansionTooLargeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

struct UnitExpansion {
  FinancialNetwork network;
  std::vector<EdgeId> origin;  // new EdgeId -> original EdgeId
};

inline constexpr std::size_t kDefaultExpansionCap = 1'000'000;

/// Replaces every edge of weight w by w parallel unit edges (weight-0 edges
/// vanish). Throws ExpansionTooLargeError beyond `cap` edges.
UnitExpansion expand_to_unit_edges(const FinancialNetwork& net, std::size_t cap = kDefaultExpansionCap);

/// Threshold strategy reproducing v's payments in `cs`: thresholds equal the
/// current flows, `unpaid_top` ranked first and the remaining edges in
/// ascending EdgeId order. Throws std::invalid_argument if v is solvent in cs
/// or `unpaid_top` is not an unsaturated outgoing edge of v.
ThresholdRankingStrategy threshold_from_flows(NodeId v, const FinancialNetwork& net, const ClearingState& cs,
                                              EdgeId unpaid_top);

}  // namespace finclear
