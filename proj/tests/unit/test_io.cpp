#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

using namespace finclear;
using namespace testing_support;

namespace {

std::string error_of(std::string_view text) {
  try {
    parse_document(text);
  } catch (const FormatError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("round trip is byte stable") {
  const auto g = gen_no_nash();
  const auto a = dump_document(g.net, &g.profile);
  const auto doc = parse_document(a);
  REQUIRE(doc.profile);
  CHECK(*doc.profile == g.profile);
  CHECK(doc.net.nodes().size() == 9);
  CHECK(doc.net.name(node_at(0)) == "v1");
  CHECK(dump_document(doc.net, &*doc.profile) == a);
}

TEST_CASE("threshold strategies round trip") {
  const auto net = gen_spoa_family(4);
  const auto se = optimal_strong_equilibrium(net);
  const auto text = dump_profile(se.profile);
  CHECK(parse_profile(text, net) == se.profile);
  CHECK(dump_profile(parse_profile(text, net)) == text);
}

TEST_CASE("field diagnostics") {
  CHECK(error_of(R"({"nodes":[{"id":0},{"id":1}],"edges":[{"id":0,"src":0,"dst":1,"weight":"3"}]})") ==
        "edges[id=0].weight: expected an integer or \"unbounded\"");
  CHECK(error_of(R"({"nodes":[{"id":0,"colour":1}],"edges":[]})") == "nodes[id=0].colour: unknown field");
  CHECK(error_of(R"({"nodes":[{"id":1}],"edges":[]})") == "nodes[0].id: ids must be dense 0..0");
  CHECK(error_of(R"({"nodes":[{"id":0}]})") == "document.edges: missing field");
  CHECK(error_of("{\n\"nodes\": [,]}") == "line 2, column 11: invalid JSON");
  CHECK(error_of(R"({"nodes":[{"id":0,"external":1.5}],"edges":[]})") == "nodes[id=0].external: expected an integer");
}

TEST_CASE("unbounded weight loads and fails validation") {
  const auto doc = parse_document(R"({"nodes":[{"id":0},{"id":1}],"edges":[{"id":0,"src":0,"dst":1,"weight":"unbounded"}]})");
  CHECK_FALSE(validate_network(doc.net).ok());
}

TEST_CASE("strategy diagnostics") {
  const auto net = gen_poa_unbounded();
  CHECK_THROWS_WITH_AS(parse_profile(R"({"strategies":[{"owner":0,"kind":"edge-ranking","ranking":[0]}]})", net),
                       doctest::Contains("strategies[0]"), FormatError);
  CHECK_THROWS_WITH_AS(parse_profile(R"({"strategies":[{"owner":0,"kind":"coin","ranking":[0,2]}]})", net),
                       "strategies[0].kind: expected \"edge-ranking\" or \"threshold\"", FormatError);
  const auto p = parse_profile(
      R"({"strategies":[{"owner":0,"kind":"threshold","ranking":[2,0],"thresholds":{"0":1,"2":0}}]})", net);
  const auto& t = std::get<ThresholdRankingStrategy>(p.at(node_at(0)));
  CHECK(t.ranking == std::vector<EdgeId>{edge_at(2), edge_at(0)});
  CHECK(t.thresholds == std::vector<Money>{0, 1});
}

TEST_CASE("dot export") {
  const auto dot = to_dot(gen_no_nash().net);
  CHECK(dot.find("digraph") == 0);
  CHECK(dot.find("\"v1\" -> \"v4\" [label=\"4\"]") != std::string::npos);
  CHECK(dot.find("shape=box, label=\"2\"") != std::string::npos);
}
