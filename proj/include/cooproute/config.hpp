#pragma once

#include <optional>
#include <string>
#include <variant>

#include "cooproute/mixed.hpp"
#include "cooproute/scenario.hpp"

namespace cooproute {

struct MixedDocument {
  MixedScenario scenario;
  std::optional<SweepGrid> alpha_grid;
  friend bool operator==(const MixedDocument&, const MixedDocument&) = default;
};

using Document = std::variant<Scenario, SweepSpec, MixedDocument>;

/// Strict JSON reader. Unknown keys are errors. Syntax errors report line and
/// column; semantic errors name the offending field; demand that cannot fit
/// under M/M/1 capacity raises InfeasibleError.
///
/// A document with a "mixed" object is a MixedDocument, one with a "sweep"
/// object is a SweepSpec, anything else a Scenario.
Document parse_document(const std::string& text);
Scenario parse_scenario(const std::string& text);

/// Canonical JSON; parse_document(serialize(d)) == d.
std::string serialize(const Document& doc);

/// Reads a whole file; ConfigError when unreadable.
std::string read_text_file(const std::string& path);

}  // namespace cooproute
