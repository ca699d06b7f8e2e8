#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "finclear/strategies.hpp"

namespace finclear {

class MissingStrategyError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Which cycle of the active-edge graph is pushed next. Canonical: the cycle
/// reached from the smallest node. Seeded: uniform among all current cycles.
struct CycleSelection {
  std::optional<std::uint64_t> seed;

  static CycleSelection canonical() { return {}; }
  static CycleSelection seeded(std::uint64_t s) { return {s}; }
};

struct ClearingStats {
  std::size_t pushes = 0;
};

/// One schedule per firm, indexed by NodeId. Firms without outgoing edges may
/// be null.
using ScheduleTable = std::vector<const Schedule*>;

/// Compiles a ranking profile. Throws MissingStrategyError or
/// UnsupportedStrategyError.
std::vector<Schedule> compile_profile(const FinancialNetwork& net, const StrategyProfile& profile);
ScheduleTable schedule_table(const std::vector<Schedule>& schedules);

/// The maximal clearing state of a ranking profile.
ClearingState top_cycle_increase(const FinancialNetwork& net, const StrategyProfile& profile,
                                 CycleSelection sel = CycleSelection::canonical(), ClearingStats* stats = nullptr);

/// Same, on precompiled schedules. Validation is the caller's job.
ClearingState top_cycle_increase(const FinancialNetwork& net, const ScheduleTable& schedules,
                                 CycleSelection sel = CycleSelection::canonical(), ClearingStats* stats = nullptr);

enum class KleeneStart { Top, Bottom };

class IterationCapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Jacobi iteration of g(a)_v = a^x_v + sum of f_e(a_u) from Top or Bottom.
ClearingState kleene_clearing(const FinancialNetwork& net, const StrategyProfile& profile, KleeneStart start);

struct ProRataClearing {
  std::vector<RationalMoney> assets;
  std::vector<RationalMoney> flows;  // indexed by EdgeId
  std::size_t iterations = 0;
  bool converged = false;  // false: `assets` is the current upper bound
};

/// Default cap: 10 * |V| * bit length of the total weight.
std::size_t default_pro_rata_cap(const FinancialNetwork& net);

/// Exact-rational Kleene iteration of the pro-rata map from Top.
ProRataClearing clear_pro_rata(const FinancialNetwork& net, std::optional<std::size_t> cap = std::nullopt);

}  // namespace finclear
