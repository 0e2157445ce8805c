#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cooproute/mixed.hpp"
#include "cooproute/nash.hpp"
#include "cooproute/scenario.hpp"

namespace cooproute {

enum class PresetKind { AlphaSweep, ParameterSweep, Mixed };

struct Preset {
  std::string name;
  std::string description;
  PresetKind kind = PresetKind::AlphaSweep;
  SweepSpec sweep;       // Nash presets; sweep.base is the scenario
  MixedScenario mixed;   // Mixed presets
  SweepGrid mixed_alpha_grid;
  std::vector<Assumption> assumed;
  /// Fails for presets whose nominal values cannot carry the demand.
  DemandCapacityCheck feasibility;
};

/// The eight canonical names; with variants, also exp3-text and
/// exp4-feasible.
std::vector<std::string> preset_names(bool include_variants = false);
/// Throws ConfigError for an unknown name.
Preset preset(const std::string& name);

struct SweepPoint {
  double param = 0.0;
  std::optional<EquilibriumSet> set;  // empty when the point failed
  std::string error;
  /// Stable cluster index per equilibrium, from nearest-flow continuation.
  std::vector<int> track;
};

struct SweepTable {
  std::string parameter;
  bool resources_increase_with_param = true;
  std::vector<UserId> users;
  std::vector<LinkId> links;
  std::vector<SweepPoint> rows;  // grid order
};

/// Largest flow distance at which clusters at adjacent grid points count as
/// the same equilibrium.
inline constexpr double kTrackRadius = 0.1;

SweepTable alpha_sweep(const Scenario& base, AlphaMode mode,
                       const SweepGrid& grid);
SweepTable parameter_sweep(const SweepSpec& spec);
/// Dispatches on spec.param.
SweepTable run_sweep(const SweepSpec& spec);

/// Assigns track ids in place: greedy nearest pairs within kTrackRadius
/// continue a track; unmatched clusters open new ones.
void assign_tracks(SweepTable& table);

enum class ParadoxKind { Braess, Cooperation };
std::string to_string(ParadoxKind k);

struct Witness {
  double from = 0.0;  // parameter where the interval starts
  double to = 0.0;    // parameter where it ends
  int points = 0;     // grid points in the interval
  int track = -1;     // continued track, or the new cluster's track
  int user = -1;      // Cooperation: the user whose cost falls
  /// "continued": one tracked cluster worsens step by step. "emergent": a
  /// cluster absent at the previous level is worse for every user than
  /// every cluster that was there.
  std::string evidence;
  std::vector<double> cost_start;  // J per user at `from`
  std::vector<double> cost_end;    // J per user at `to`
};

struct ParadoxReport {
  ParadoxKind kind = ParadoxKind::Braess;
  /// Braess: "increasing" when resources grow with the parameter.
  std::string direction;
  std::vector<Witness> witnesses;
  bool multiplicity_in_sweep = false;
  /// Cooperation witnesses without any multiplicity in the sweep.
  bool discrepancy = false;
};

inline constexpr double kParadoxMargin = 1e-6;

ParadoxReport detect_braess(const SweepTable& table);
/// Users checked: the first user for Asymmetric, every user for Symmetric.
ParadoxReport detect_cooperation_paradox(const SweepTable& table,
                                         AlphaMode mode);

struct MixedSweepRow {
  double alpha = 0.0;
  std::vector<MixedSolution> numeric;
  std::vector<MixedSolution> closed_form;  // verified only
  std::string error;
};

std::vector<MixedSweepRow> mixed_alpha_sweep(const MixedScenario& base,
                                             const SweepGrid& grid,
                                             const MixedConfig& cfg = {});

}  // namespace cooproute
