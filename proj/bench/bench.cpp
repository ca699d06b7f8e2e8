// Parallel kernels against their serial references on a seeded batch of
// random instances. Every row also checks that both runs agree.
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>

#include <omp.h>

#include <CLI11.hpp>

#include "finclear/finclear.hpp"

using namespace finclear;

namespace {

// Caps each call so one unlucky instance cannot dominate a row.
const SearchBudget kBudget{200'000, std::chrono::seconds(10)};

struct Timed {
  double seconds = 0;
  std::vector<Money> digest;  // one summary value per instance; equal digests mean equal answers
};

Timed run(const std::vector<FinancialNetwork>& nets, const std::function<Money(const FinancialNetwork&)>& kernel) {
  Timed t;
  const auto t0 = std::chrono::steady_clock::now();
  for (const auto& net : nets) t.digest.push_back(kernel(net));
  t.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return t;
}

Money best_responses(const FinancialNetwork& net, Execution ex) {
  const auto profile = default_profile(net);
  const auto state = top_cycle_increase(net, profile);
  BestResponseOptions opts;
  opts.execution = ex;
  Money sum = 0;
  for (std::size_t v = 0; v < net.num_nodes(); ++v) {
    const NodeId id = node_at(v);
    if (net.out_edges(id).empty() || state.asset(id) >= total_liabilities(net, id)) continue;
    sum += best_response_exact(net, profile, id, SearchSpace::ThresholdRanking, kBudget, opts).value;
  }
  return sum;
}

Money enumeration(const FinancialNetwork& net, Execution ex) {
  EnumerateOptions opts;
  opts.route = EnumerationRoute::FullProduct;
  opts.execution = ex;
  const auto r = enumerate_equilibria(net, SearchSpace::EdgeRanking, kBudget, opts);
  Money sum = static_cast<Money>(r.equilibria.size());
  for (const auto& eq : r.equilibria) sum += revenue(net, eq.state);
  return sum;
}

Money strong_check(const FinancialNetwork& net, Execution ex) {
  CheckOptions opts;
  opts.execution = ex;
  const auto se = optimal_strong_equilibrium(net);
  const auto rep = is_strong_equilibrium(net, se.profile, SearchSpace::ThresholdRanking, kBudget, opts);
  return static_cast<Money>(rep.verdict);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parallel against serial timings for the search kernels"};
  int instances = 200;
  std::uint64_t seed = 7;
  app.add_option("--instances", instances, "random instances per kernel")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "generator seed");
  CLI11_PARSE(app, argc, argv);

  std::mt19937_64 rng(seed);
  RandomNetworkParams params;
  params.max_nodes = 6;
  params.max_edges = 9;
  params.max_weight = 3;
  std::vector<FinancialNetwork> nets;
  for (int i = 0; i < instances; ++i) nets.push_back(random_network(rng, params));

  struct Row {
    const char* name;
    std::function<Money(const FinancialNetwork&, Execution)> kernel;
  };
  const std::vector<Row> rows = {
      {"best response (threshold space)", best_responses},
      {"enumeration (full product)", enumeration},
      {"social optimum (edge space)",
       [](const FinancialNetwork& n, Execution ex) { return social_optimum_edge_ranking(n, kBudget, ex).revenue; }},
      {"strong check (threshold space)", strong_check},
  };

  std::printf("%d instances, seed %llu, %d OpenMP threads\n", instances, static_cast<unsigned long long>(seed),
              omp_get_max_threads());
  std::printf("%-34s %10s %10s %8s %s\n", "kernel", "serial s", "parallel s", "speedup", "agree");
  bool all_agree = true;
  for (const auto& row : rows) {
    const auto serial = run(nets, [&](const FinancialNetwork& n) { return row.kernel(n, Execution::Serial); });
    const auto parallel = run(nets, [&](const FinancialNetwork& n) { return row.kernel(n, Execution::Parallel); });
    const bool agree = serial.digest == parallel.digest;
    all_agree = all_agree && agree;
    std::printf("%-34s %10.3f %10.3f %7.2fx %s\n", row.name, serial.seconds, parallel.seconds,
                parallel.seconds > 0 ? serial.seconds / parallel.seconds : 0.0, agree ? "yes" : "NO");
    std::fflush(stdout);
  }
  return all_agree ? 0 : 1;
}
