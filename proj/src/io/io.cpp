#include "finclear/io.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace finclear {

namespace {

using json = nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) { throw FormatError(where + ": " + what); }

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw FormatError("line " + std::to_string(line) + ", column " + std::to_string(col) + ": invalid JSON");
  }
}

void only_fields(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) fail(where, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      fail(where + "." + key, "unknown field");
    }
  }
}

const json& field(const json& obj, const std::string& where, const char* key) {
  if (!obj.contains(key)) fail(where + "." + key, "missing field");
  return obj.at(key);
}

Money as_integer(const json& v, const std::string& where) {
  if (v.is_number_integer() && !v.is_number_unsigned()) return v.get<Money>();
  if (v.is_number_unsigned()) {
    const auto u = v.get<std::uint64_t>();
    if (u > static_cast<std::uint64_t>(kMaxTotalWeight)) fail(where, "integer too large");
    return static_cast<Money>(u);
  }
  fail(where, "expected an integer");
}

std::size_t as_index(const json& v, const std::string& where) {
  const Money x = as_integer(v, where);
  if (x < 0) fail(where, "expected a non-negative id");
  return static_cast<std::size_t>(x);
}

std::vector<const json*> dense_by_id(const json& arr, const std::string& name) {
  if (!arr.is_array()) fail(name, "expected an array");
  std::vector<const json*> out(arr.size(), nullptr);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string where = name + "[" + std::to_string(i) + "]";
    if (!arr[i].is_object()) fail(where, "expected an object");
    const std::size_t id = as_index(field(arr[i], where, "id"), where + ".id");
    if (id >= arr.size()) fail(where + ".id", "ids must be dense 0.." + std::to_string(arr.size() - 1));
    if (out[id]) fail(where + ".id", "duplicate id " + std::to_string(id));
    out[id] = &arr[i];
  }
  return out;
}

Strategy parse_strategy(const json& s, const std::string& where, const FinancialNetwork& net) {
  only_fields(s, where, {"owner", "kind", "ranking", "thresholds"});
  const std::size_t owner = as_index(field(s, where, "owner"), where + ".owner");
  if (owner >= net.num_nodes()) fail(where + ".owner", "unknown node " + std::to_string(owner));
  const json& kind = field(s, where, "kind");
  if (!kind.is_string()) fail(where + ".kind", "expected a string");
  const json& r = field(s, where, "ranking");
  if (!r.is_array()) fail(where + ".ranking", "expected an array");
  std::vector<EdgeId> ranking;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const std::size_t e = as_index(r[i], where + ".ranking[" + std::to_string(i) + "]");
    if (e >= net.num_edges()) fail(where + ".ranking[" + std::to_string(i) + "]", "unknown edge " + std::to_string(e));
    ranking.push_back(edge_at(e));
  }
  Strategy out;
  if (kind == "edge-ranking") {
    if (s.contains("thresholds")) fail(where + ".thresholds", "not allowed for edge-ranking");
    out = EdgeRankingStrategy{node_at(owner), ranking};
  } else if (kind == "threshold") {
    const json& t = field(s, where, "thresholds");
    if (!t.is_object()) fail(where + ".thresholds", "expected an object keyed by edge id");
    ThresholdRankingStrategy ts{node_at(owner), ranking, std::vector<Money>(ranking.size(), 0)};
    std::set<std::size_t> seen;
    for (const auto& [key, value] : t.items()) {
      const std::string w = where + ".thresholds." + key;
      std::size_t e = 0;
      try {
        std::size_t used = 0;
        e = std::stoul(key, &used);
        if (used != key.size()) throw std::invalid_argument(key);
      } catch (const std::exception&) {
        fail(w, "key is not an edge id");
      }
      const auto pos = std::find(ranking.begin(), ranking.end(), edge_at(e));
      if (pos == ranking.end()) fail(w, "edge is not in the ranking");
      ts.thresholds[pos - ranking.begin()] = as_integer(value, w);
      seen.insert(e);
    }
    if (seen.size() != ranking.size()) fail(where + ".thresholds", "one threshold per ranked edge is required");
    out = ts;
  } else {
    fail(where + ".kind", "expected \"edge-ranking\" or \"threshold\"");
  }
  try {
    validate_strategy(net, out);
  } catch (const InvalidStrategyError& e) {
    fail(where, e.what());
  }
  return out;
}

StrategyProfile parse_strategies(const json& arr, const FinancialNetwork& net) {
  if (!arr.is_array()) fail("strategies", "expected an array");
  StrategyProfile p(net.num_nodes());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string where = "strategies[" + std::to_string(i) + "]";
    Strategy s = parse_strategy(arr[i], where, net);
    if (p.has(owner_of(s))) fail(where + ".owner", "duplicate strategy for this firm");
    p.set(std::move(s));
  }
  return p;
}

json strategy_json(const Strategy& s) {
  json j;
  j["owner"] = index(owner_of(s));
  if (const auto* e = std::get_if<EdgeRankingStrategy>(&s)) {
    j["kind"] = "edge-ranking";
    j["ranking"] = json::array();
    for (EdgeId x : e->ranking) j["ranking"].push_back(index(x));
  } else if (const auto* t = std::get_if<ThresholdRankingStrategy>(&s)) {
    j["kind"] = "threshold";
    j["ranking"] = json::array();
    j["thresholds"] = json::object();
    for (std::size_t i = 0; i < t->ranking.size(); ++i) {
      j["ranking"].push_back(index(t->ranking[i]));
      j["thresholds"][std::to_string(index(t->ranking[i]))] = t->thresholds[i];
    }
  } else {
    throw FormatError("pro-rata strategies cannot be saved");
  }
  return j;
}

json profile_json(const StrategyProfile& p) {
  json arr = json::array();
  for (std::size_t v = 0; v < p.size(); ++v) {
    if (p.has(node_at(v))) arr.push_back(strategy_json(p.at(node_at(v))));
  }
  return arr;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path.string() + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string dot_id(const FinancialNetwork& net, NodeId v) {
  std::string out = "\"";
  for (char c : net.label(v)) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

NetworkDocument parse_document(std::string_view text) {
  const json doc = parse_json(text);
  only_fields(doc, "document", {"nodes", "edges", "strategies"});
  std::vector<Node> nodes;
  const auto node_objs = dense_by_id(field(doc, "document", "nodes"), "nodes");
  for (std::size_t i = 0; i < node_objs.size(); ++i) {
    const json& n = *node_objs[i];
    const std::string where = "nodes[id=" + std::to_string(i) + "]";
    only_fields(n, where, {"id", "external", "name"});
    Node node;
    node.external = n.contains("external") ? as_integer(n.at("external"), where + ".external") : 0;
    if (n.contains("name")) {
      if (!n.at("name").is_string()) fail(where + ".name", "expected a string");
      node.name = n.at("name").get<std::string>();
    }
    nodes.push_back(std::move(node));
  }
  std::vector<LiabilityEdge> edges;
  const auto edge_objs = dense_by_id(field(doc, "document", "edges"), "edges");
  for (std::size_t i = 0; i < edge_objs.size(); ++i) {
    const json& e = *edge_objs[i];
    const std::string where = "edges[id=" + std::to_string(i) + "]";
    only_fields(e, where, {"id", "src", "dst", "weight"});
    LiabilityEdge le;
    le.id = edge_at(i);
    le.src = node_at(as_index(field(e, where, "src"), where + ".src"));
    le.dst = node_at(as_index(field(e, where, "dst"), where + ".dst"));
    const json& w = field(e, where, "weight");
    if (w.is_string()) {
      if (w != "unbounded") fail(where + ".weight", "expected an integer or \"unbounded\"");
      le.weight = Capacity::unbounded();
    } else if (w.is_number_integer()) {
      le.weight = Capacity(as_integer(w, where + ".weight"));
    } else {
      fail(where + ".weight", "expected an integer or \"unbounded\"");
    }
    edges.push_back(le);
  }
  NetworkDocument out{FinancialNetwork(std::move(nodes), std::move(edges)), std::nullopt};
  if (doc.contains("strategies")) {
    require_valid(out.net);
    out.profile = parse_strategies(doc.at("strategies"), out.net);
  }
  return out;
}

NetworkDocument load_document(const std::filesystem::path& path) { return parse_document(read_file(path)); }

StrategyProfile parse_profile(std::string_view text, const FinancialNetwork& net) {
  const json doc = parse_json(text);
  only_fields(doc, "profile", {"strategies"});
  return parse_strategies(field(doc, "profile", "strategies"), net);
}

StrategyProfile load_profile(const std::filesystem::path& path, const FinancialNetwork& net) {
  return parse_profile(read_file(path), net);
}

std::string dump_document(const FinancialNetwork& net, const StrategyProfile* profile) {
  json doc;
  doc["nodes"] = json::array();
  for (std::size_t v = 0; v < net.num_nodes(); ++v) {
    json n{{"id", v}, {"external", net.external(node_at(v))}};
    if (!net.name(node_at(v)).empty()) n["name"] = net.name(node_at(v));
    doc["nodes"].push_back(std::move(n));
  }
  doc["edges"] = json::array();
  for (const auto& e : net.edges()) {
    json j{{"id", index(e.id)}, {"src", index(e.src)}, {"dst", index(e.dst)}};
    if (e.weight.is_unbounded()) {
      j["weight"] = "unbounded";
    } else {
      j["weight"] = e.weight.amount();
    }
    doc["edges"].push_back(std::move(j));
  }
  if (profile) doc["strategies"] = profile_json(*profile);
  return doc.dump(2) + "\n";
}

std::string dump_profile(const StrategyProfile& profile) {
  json doc;
  doc["strategies"] = profile_json(profile);
  return doc.dump(2) + "\n";
}

std::string to_dot(const FinancialNetwork& net) {
  std::ostringstream os;
  os << "digraph financial_network {\n  rankdir=LR;\n";
  for (std::size_t v = 0; v < net.num_nodes(); ++v) {
    const NodeId id = node_at(v);
    os << "  " << dot_id(net, id) << " [shape=circle];\n";
    if (net.external(id) > 0) {
      os << "  \"ext_" << v << "\" [shape=box, label=\"" << net.external(id) << "\"];\n";
      os << "  \"ext_" << v << "\" -> " << dot_id(net, id) << " [style=dashed, arrowhead=none];\n";
    }
  }
  for (const auto& e : net.edges()) {
    os << "  " << dot_id(net, e.src) << " -> " << dot_id(net, e.dst) << " [label=\"" << e.weight << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace finclear
