#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "finclear/network.hpp"
#include "finclear/strategies.hpp"

namespace finclear {

/// Malformed document. The message names the line or the offending field,
/// e.g. "edges[2].weight: expected an integer or \"unbounded\"".
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A network plus the strategies listed with it, if any. Structural checks
/// (dense ids, known fields, types) happen here; economic invariants are left
/// to validate_network.
struct NetworkDocument {
  FinancialNetwork net;
  std::optional<StrategyProfile> profile;
};

NetworkDocument parse_document(std::string_view text);
NetworkDocument load_document(const std::filesystem::path& path);

/// A profile file holds only a "strategies" array, resolved against `net`.
StrategyProfile parse_profile(std::string_view text, const FinancialNetwork& net);
StrategyProfile load_profile(const std::filesystem::path& path, const FinancialNetwork& net);

/// Canonical form: sorted keys, ids ascending, two-space indent, trailing
/// newline. Pro-rata strategies have no file representation and throw.
std::string dump_document(const FinancialNetwork& net, const StrategyProfile* profile = nullptr);
std::string dump_profile(const StrategyProfile& profile);

/// Graphviz: edge labels are weights, external assets are boxed node labels.
std::string to_dot(const FinancialNetwork& net);

}  // namespace finclear
