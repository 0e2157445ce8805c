#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cooproute/experiments.hpp"
#include "cooproute/game.hpp"
#include "cooproute/nash.hpp"

namespace cooproute {

/// printf "%.12g"; the one number format used by every CSV.
std::string format_number(double v);

/// A parsed numeric CSV: header plus rows of equal width.
struct CsvData {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  friend bool operator==(const CsvData&, const CsvData&) = default;
};

/// Columns: param, cluster, basin_count, J_i and Jhat_i per user, then f_i_l
/// per user and link. Rows follow grid order, then equilibrium order within a
/// point; cluster is the track id. Failed points contribute no rows.
std::string emit_csv(const SweepTable& table);
std::string emit_csv(const CsvData& data);
/// Inverse of emit_csv; throws ConfigError on ragged or non-numeric input.
CsvData parse_csv(const std::string& text);

/// One row per equilibrium: cluster, basin_count, stationary_hits, J_i,
/// Jhat_i, f_i_l, kkt_residual, deviation_gain.
std::string emit_equilibria_csv(const Game& game, const EquilibriumSet& set);

struct MixedCsvRow {
  double alpha = 0.0;
  std::string source;  // "numeric" or "closed_form"
  MixedSolution solution;
};

/// Columns: alpha, source, case, subcase, variant, x, w2, verified.
std::string emit_mixed_csv(const std::vector<MixedCsvRow>& rows);

/// JSON for a paradox report.
std::string paradox_json(const ParadoxReport& report);

/// JSON verification report for one profile.
std::string verification_json(const Game& game, const FlowProfile& profile,
                               const NashVerification& v);

struct RunManifest {
  std::string version;
  std::string command;
  std::string source;  // "preset:<name>" or the config path
  SolverConfig solver;
  std::vector<std::pair<std::string, double>> phases;  // seconds
  std::vector<std::string> warnings;

  /// One warning per assumed field.
  void warn_assumed(const std::vector<Assumption>& assumed);
  /// One warning per nonzero solver event counter of the set.
  void warn_solver(const std::string& where, const SetDiagnostics& d);
  std::string json() const;
};

/// Per-user path flows from a JSON document {"flows": [[...], ...]}.
std::vector<std::vector<double>> parse_flows(const std::string& text);

}  // namespace cooproute
