#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include "finclear/finclear.hpp"

using namespace finclear;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 2;
constexpr int kExitBudget = 3;
constexpr int kExitUsage = 64;

struct Options {
  std::string input;
  std::size_t max_candidates = 1'000'000;
  std::size_t timeout_secs = 60;
  bool serial = false;
};

SearchBudget budget_of(const Options& o) {
  return SearchBudget{o.max_candidates, std::chrono::milliseconds(o.timeout_secs * 1000)};
}

Execution execution_of(const Options& o) { return o.serial ? Execution::Serial : Execution::Parallel; }

NetworkDocument read_input(const Options& o) {
  if (o.input.empty() || o.input == "-") {
    std::string text((std::istreambuf_iterator<char>(std::cin)), std::istreambuf_iterator<char>());
    return parse_document(text);
  }
  return load_document(o.input);
}

NodeId resolve_firm(const FinancialNetwork& net, const std::string& firm) {
  if (auto v = net.find_node(firm)) return *v;
  try {
    std::size_t used = 0;
    const auto id = std::stoul(firm, &used);
    if (used == firm.size() && id < net.num_nodes()) return node_at(id);
  } catch (const std::exception&) {
  }
  throw UnknownNodeError("unknown firm \"" + firm + "\"");
}

SearchSpace parse_space(const std::string& s) { return s == "threshold" ? SearchSpace::ThresholdRanking : SearchSpace::EdgeRanking; }

std::string rational_str(const RationalMoney& r) {
  return boost::multiprecision::numerator(r).str() + "/" + boost::multiprecision::denominator(r).str();
}

// Profile-file entries override the document's strategies, which override
// ascending-EdgeId rankings.
StrategyProfile profile_for(const NetworkDocument& doc, const std::string& profile_path) {
  StrategyProfile p = doc.profile ? *doc.profile : default_profile(doc.net);
  for (std::size_t v = 0; v < doc.net.num_nodes(); ++v) {
    if (!p.has(node_at(v)) && !doc.net.out_edges(node_at(v)).empty()) p.set(default_profile(doc.net).at(node_at(v)));
  }
  if (profile_path.empty()) return p;
  const auto overlay = load_profile(profile_path, doc.net);
  for (std::size_t v = 0; v < overlay.size(); ++v) {
    if (overlay.has(node_at(v))) p.set(overlay.at(node_at(v)));
  }
  return p;
}

void print_state(const FinancialNetwork& net, const ClearingState& cs) {
  for (std::size_t v = 0; v < net.num_nodes(); ++v) {
    std::cout << "a_" << net.label(node_at(v)) << " = " << cs.assets[v] << "\n";
  }
  for (const auto& e : net.edges()) {
    std::cout << "f_" << index(e.id) << " (" << net.label(e.src) << "," << net.label(e.dst)
              << ") = " << cs.flows[e.id] << "\n";
  }
  std::cout << "revenue = " << revenue(net, cs) << "\n";
}

void print_profile(const FinancialNetwork& net, const StrategyProfile& p, const std::string& indent = "") {
  for (std::size_t v = 0; v < p.size(); ++v) {
    if (p.has(node_at(v))) {
      std::cout << indent << "pi_" << net.label(node_at(v)) << " = " << describe(net, p.at(node_at(v))) << "\n";
    }
  }
}

void print_witness(const FinancialNetwork& net, const DeviationWitness& w) {
  std::cout << "witness coalition = {";
  for (std::size_t i = 0; i < w.coalition.size(); ++i) std::cout << (i ? "," : "") << net.label(w.coalition[i]);
  std::cout << "}\n";
  for (std::size_t i = 0; i < w.coalition.size(); ++i) {
    const NodeId v = w.coalition[i];
    std::cout << "  " << net.label(v) << ": " << describe(net, w.new_strategies.at(v)) << " assets " << w.before[i]
              << " -> " << w.after[i] << "\n";
  }
}

std::string opt_str(const std::optional<Money>& m) { return m ? std::to_string(*m) : "none"; }
std::string opt_str(const std::optional<Ratio>& r) { return r ? r->str() : "none"; }

std::vector<int> parse_ints(const std::string& s) {
  std::vector<int> out;
  std::istringstream in(s);
  int x;
  while (in >> x) out.push_back(x);
  if (!in.eof()) throw std::invalid_argument("expected integers in \"" + s + "\"");
  return out;
}

// "1 2 -3; -1 4" -> clauses.
std::vector<std::vector<int>> parse_groups(const std::string& s) {
  std::vector<std::vector<int>> out;
  std::istringstream in(s);
  std::string part;
  while (std::getline(in, part, ';')) {
    if (part.find_first_not_of(" \t") == std::string::npos) continue;
    out.push_back(parse_ints(part));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Strategic debt clearing on financial networks"};
  app.require_subcommand(1);
  app.fallthrough();  // budget flags may follow the subcommand
  Options o;
  app.add_option("--max-candidates", o.max_candidates, "Search budget: candidate evaluations")->capture_default_str();
  app.add_option("--timeout-secs", o.timeout_secs, "Search budget: wall-clock seconds")->capture_default_str();
  app.add_flag("--serial", o.serial, "Run the serial reference kernels");

  auto input_opt = [&](CLI::App* sub) { sub->add_option("file", o.input, "Network JSON (default: stdin)"); };

  auto* validate = app.add_subcommand("validate", "Check network invariants");
  input_opt(validate);

  auto* clear = app.add_subcommand("clear", "Maximal clearing state of a profile");
  input_opt(clear);
  std::string profile_path, oracle;
  bool pro_rata = false;
  clear->add_option("--profile", profile_path, "Profile JSON (default: the file's strategies, else ascending rankings)");
  clear->add_flag("--pro-rata", pro_rata, "Pro-rata reference clearing");
  clear->add_option("--oracle", oracle, "Kleene iteration instead of TopCycleIncrease")
      ->check(CLI::IsMember({"kleene-top", "kleene-bottom"}));

  auto* opt_se = app.add_subcommand("opt-se", "Optimal strong equilibrium from a maximum-value circulation");
  input_opt(opt_se);
  bool emit_json = false;
  opt_se->add_flag("--json", emit_json, "Print the profile as JSON");

  std::string space_name = "edge";

  auto* best = app.add_subcommand("best-response", "Exact best response of one firm");
  input_opt(best);
  std::string firm;
  best->add_option("--firm", firm, "Firm id or name")->required();
  best->add_option("--space", space_name, "edge or threshold")->check(CLI::IsMember({"edge", "threshold"}));
  best->add_option("--profile", profile_path, "Profile JSON");

  auto* check = app.add_subcommand("check", "Nash or strong equilibrium check");
  input_opt(check);
  bool want_nash = false, want_strong = false;
  auto* nash_flag = check->add_flag("--nash", want_nash);
  auto* strong_flag = check->add_flag("--strong", want_strong);
  nash_flag->excludes(strong_flag);
  check->add_option("--space", space_name, "edge or threshold")->check(CLI::IsMember({"edge", "threshold"}));
  check->add_option("--profile", profile_path, "Profile JSON");

  auto* enumerate = app.add_subcommand("enumerate", "All pure equilibria");
  input_opt(enumerate);
  bool only_strong = false;
  std::size_t max_results = 0;
  enumerate->add_option("--space", space_name, "edge or threshold")->check(CLI::IsMember({"edge", "threshold"}));
  enumerate->add_flag("--strong", only_strong, "Strong equilibria only");
  enumerate->add_option("--max-results", max_results, "Stop after this many (0: all)");

  auto* metrics = app.add_subcommand("metrics", "Welfare metrics: opt, PoA, PoS, SPoA, SPoS, d");
  input_opt(metrics);
  std::string metrics_space = "threshold";
  metrics->add_option("--space", metrics_space, "edge or threshold")->check(CLI::IsMember({"edge", "threshold"}));

  auto* dot = app.add_subcommand("export-dot", "Graphviz rendering");
  input_opt(dot);

  auto* gen = app.add_subcommand("gen", "Instance families and reduction gadgets");
  gen->require_subcommand(1);
  int d = 5, n = 5;
  Money M = 10, w1_external = 1, v9_external = 0;
  std::string formula, triples;
  int elements = 0;
  std::string variant = "best-response";
  std::uint64_t seed = 0;
  auto* g_no_nash = gen->add_subcommand("no-nash", "Game without a pure Nash equilibrium");
  g_no_nash->add_option("--v9-external", v9_external, "External assets added at v9");
  auto* g_spoa = gen->add_subcommand("spoa", "Coin-ranking family with strong price of anarchy d-1");
  g_spoa->add_option("--d", d)->capture_default_str();
  auto* g_poa = gen->add_subcommand("poa-unbounded", "Four-firm game with unbounded price of anarchy");
  auto* g_spos = gen->add_subcommand("edge-spos", "Edge-ranking family with strong price of stability n/2");
  g_spos->add_option("--n", n)->capture_default_str();
  g_spos->add_option("--M", M)->capture_default_str();
  auto* g_pos = gen->add_subcommand("pos-unbounded", "Family with unbounded price of stability");
  g_pos->add_option("--M", M)->capture_default_str();
  g_pos->add_option("--w1-external", w1_external)->capture_default_str();
  auto* g_sat = gen->add_subcommand("sat", "Best-response gadget from a CNF formula");
  g_sat->add_option("--formula", formula, "Clauses separated by ';', literals as signed integers");
  int sat_vars = 0;
  g_sat->add_option("--vars", sat_vars, "Number of variables (default: largest literal)");
  auto* g_3dm = gen->add_subcommand("3dm", "Reduction gadget from a 3-dimensional matching instance");
  g_3dm->add_option("--elements", elements)->required();
  g_3dm->add_option("--triples", triples, "Triples of 0-based elements separated by ';'")->required();
  g_3dm->add_option("--variant", variant)->check(CLI::IsMember({"best-response", "decision"}))->capture_default_str();
  auto* g_random = gen->add_subcommand("random", "Random small network and profile");
  g_random->add_option("--seed", seed)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }
  if (check->parsed() && !want_nash && !want_strong) {
    std::cerr << "error: check needs --nash or --strong\n\n" << check->help();
    return kExitUsage;
  }

  const SearchBudget budget = budget_of(o);
  const Execution exec = execution_of(o);
  try {
    if (gen->parsed()) {
      FinancialNetwork net;
      std::optional<StrategyProfile> profile;
      if (g_no_nash->parsed()) {
        auto g = gen_no_nash();
        net = v9_external ? g.net.with_external(g.net.node_named("v9"), v9_external) : g.net;
        profile = g.profile;
      } else if (g_spoa->parsed()) {
        net = gen_spoa_family(d);
        profile = spoa_central_profile(net, d);
      } else if (g_poa->parsed()) {
        net = gen_poa_unbounded();
      } else if (g_spos->parsed()) {
        net = gen_edge_spos_family(n, M);
      } else if (g_pos->parsed()) {
        net = gen_pos_unbounded(M, w1_external);
      } else if (g_sat->parsed()) {
        SatFormula f = five_variable_sat_example();
        if (!formula.empty()) {
          f = SatFormula{sat_vars, parse_groups(formula)};
          for (const auto& c : f.clauses) {
            for (int lit : c) f.num_vars = std::max(f.num_vars, sat_vars ? sat_vars : std::abs(lit));
          }
        }
        auto g = gen_from_sat(f);
        net = g.net;
        profile = g.profile;
      } else if (g_3dm->parsed()) {
        ThreeDmInstance inst{elements, {}};
        for (const auto& t : parse_groups(triples)) {
          if (t.size() != 3) throw InvalidInstanceError("every triple needs three elements");
          inst.triples.push_back({t[0], t[1], t[2]});
        }
        auto g = gen_from_3dm(inst, variant == "decision" ? ThreeDmVariant::Decision : ThreeDmVariant::BestResponse);
        net = g.net;
        profile = g.profile;
      } else if (g_random->parsed()) {
        std::mt19937_64 rng(seed);
        net = random_network(rng, {});
        profile = random_profile(net, rng, 0.3);
      }
      if (!profile) profile = default_profile(net);
      std::cout << dump_document(net, &*profile);
      return kExitOk;
    }

    const NetworkDocument doc = read_input(o);
    const FinancialNetwork& net = doc.net;
    if (validate->parsed()) {
      const auto rep = validate_network(net);
      if (rep.ok()) {
        std::cout << "valid: " << net.num_nodes() << " firms, " << net.num_edges() << " edges\n";
        return kExitOk;
      }
      for (const auto& v : rep.violations) std::cout << "violation: " << v.message << "\n";
      return kExitInvalid;
    }
    require_valid(net);

    if (dot->parsed()) {
      std::cout << to_dot(net);
      return kExitOk;
    }
    if (clear->parsed()) {
      if (pro_rata) {
        const auto r = clear_pro_rata(net);
        for (std::size_t v = 0; v < net.num_nodes(); ++v) {
          std::cout << "a_" << net.label(node_at(v)) << " = " << rational_str(r.assets[v]) << "\n";
        }
        for (const auto& e : net.edges()) {
          std::cout << "f_" << index(e.id) << " (" << net.label(e.src) << "," << net.label(e.dst)
                    << ") = " << rational_str(r.flows[index(e.id)]) << "\n";
        }
        std::cout << "iterations = " << r.iterations << "\nconverged = " << (r.converged ? "true" : "false") << "\n";
        return r.converged ? kExitOk : kExitBudget;
      }
      const auto profile = profile_for(doc, profile_path);
      validate_profile(net, profile);
      ClearingState cs;
      if (oracle.empty()) {
        cs = top_cycle_increase(net, profile);
      } else {
        cs = kleene_clearing(net, profile, oracle == "kleene-top" ? KleeneStart::Top : KleeneStart::Bottom);
      }
      print_state(net, cs);
      return kExitOk;
    }
    if (opt_se->parsed()) {
      const auto se = optimal_strong_equilibrium(net);
      if (emit_json) {
        std::cout << dump_profile(se.profile);
        return kExitOk;
      }
      print_profile(net, se.profile);
      std::cout << "revenue = " << revenue(net, se.state) << "\n";
      std::cout << "circulation value = " << se.circulation.total() << "\n";
      return kExitOk;
    }
    if (best->parsed()) {
      const auto profile = profile_for(doc, profile_path);
      const NodeId v = resolve_firm(net, firm);
      BestResponseOptions bo;
      bo.execution = exec;
      const auto br = best_response_exact(net, profile, v, parse_space(space_name), budget, bo);
      std::cout << "firm = " << net.label(v) << "\n";
      std::cout << "value = " << br.value << "\n";
      std::cout << "strategy = " << describe(net, br.strategy) << "\n";
      if (br.already_solvent) std::cout << "already solvent\n";
      std::cout << "exhaustive = " << (br.exhaustive ? "true" : "false") << "\n";
      return br.exhaustive ? kExitOk : kExitBudget;
    }
    if (check->parsed()) {
      const auto profile = profile_for(doc, profile_path);
      CheckOptions co;
      co.execution = exec;
      const auto space = parse_space(space_name);
      const auto rep = want_nash ? is_nash(net, profile, space, budget, co)
                                 : is_strong_equilibrium(net, profile, space, budget, co);
      std::cout << "verdict = " << to_string(rep.verdict) << "\n";
      std::cout << "space = " << to_string(rep.space) << "\n";
      if (rep.witness) print_witness(net, *rep.witness);
      std::cout << "exhaustive = " << (rep.exhaustive ? "true" : "false") << "\n";
      return rep.exhaustive ? kExitOk : kExitBudget;
    }
    if (enumerate->parsed()) {
      EnumerateOptions eo;
      eo.require_strong = only_strong;
      eo.max_results = max_results;
      eo.execution = exec;
      const auto r = enumerate_equilibria(net, parse_space(space_name), budget, eo);
      std::cout << r.equilibria.size() << (only_strong ? " strong" : "") << " equilibria"
                << (r.truncated ? " (truncated)" : "") << "\n";
      for (std::size_t i = 0; i < r.equilibria.size(); ++i) {
        std::cout << "equilibrium " << i + 1 << ": revenue " << revenue(net, r.equilibria[i].state) << "\n";
        print_profile(net, r.equilibria[i].profile, "  ");
      }
      std::cout << "exhaustive = " << (r.exhaustive ? "true" : "false") << "\n";
      return r.exhaustive ? kExitOk : kExitBudget;
    }
    if (metrics->parsed()) {
      const auto m = welfare_metrics(net, parse_space(metrics_space), budget);
      std::cout << "space = " << metrics_space << "\n";
      std::cout << "opt = " << m.opt_revenue << "\n";
      std::cout << "equilibria = " << m.num_equilibria << "\n";
      std::cout << "strong equilibria = " << m.num_strong << "\n";
      std::cout << "best eq revenue = " << opt_str(m.best_eq_revenue) << "\n";
      std::cout << "worst eq revenue = " << opt_str(m.worst_eq_revenue) << "\n";
      std::cout << "best strong revenue = " << opt_str(m.best_strong_revenue) << "\n";
      std::cout << "worst strong revenue = " << opt_str(m.worst_strong_revenue) << "\n";
      std::cout << "poa = " << opt_str(m.poa) << "\n";
      std::cout << "pos = " << opt_str(m.pos) << "\n";
      std::cout << "spoa = " << opt_str(m.spoa) << "\n";
      std::cout << "spos = " << opt_str(m.spos) << "\n";
      std::cout << "d = " << m.d.d << (m.d.exact ? "" : " (inexact)") << "\n";
      std::cout << "exhaustive = " << (m.exhaustive ? "true" : "false") << "\n";
      return m.exhaustive ? kExitOk : kExitBudget;
    }
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::invalid_argument& e) {
    // Invalid networks, strategies, profiles and instances.
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}
