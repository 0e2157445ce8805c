#pragma once

#include <string>
#include <vector>

#include "cooproute/game.hpp"
#include "cooproute/nash.hpp"

namespace cooproute {

enum class Topology { Parallel, LoadBalancing, Custom };
std::string to_string(Topology t);
Topology topology_from_string(const std::string& s);

/// A preset or config value that the source material leaves unstated.
struct Assumption {
  std::string field;
  std::string value;
  std::string reason;
  friend bool operator==(const Assumption&, const Assumption&) = default;
};

struct Scenario {
  std::string name;
  Topology topology = Topology::Custom;
  Network network;
  std::vector<UserSpec> users;
  CooperationProfile coop;
  SolverConfig solver;
  std::vector<Assumption> assumed;

  Game game() const { return Game(network, users, coop, solver.path_cap); }
  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Parallel links l1, l2 from node 1 to node 2; every user routes 1 -> 2.
Network parallel_network(const CostSpec& l1, const CostSpec& l2);
/// Nodes 1..3 with l1: 1->3, l2: 2->3, l3: 1->2, l4: 2->1.
Network load_balancing_network(const CostSpec& l1, const CostSpec& l2,
                               const CostSpec& l3, const CostSpec& l4);

enum class SweepParameter { Alpha, LinearSlope, Capacity };
std::string to_string(SweepParameter p);
SweepParameter sweep_parameter_from_string(const std::string& s);

/// Symmetric: every user gets alpha. Asymmetric: user 1 gets alpha, the rest
/// are selfish.
enum class AlphaMode { Symmetric, Asymmetric };
std::string to_string(AlphaMode m);
AlphaMode alpha_mode_from_string(const std::string& s);

struct SweepGrid {
  double from = 0.0;
  double to = 0.0;
  double step = 1.0;
  /// from + k*step up to `to`; the last point snaps to `to` within 1e-9 of a
  /// step. Throws ConfigError unless step > 0 and to >= from.
  std::vector<double> values() const;
  friend bool operator==(const SweepGrid&, const SweepGrid&) = default;
};

struct SweepSpec {
  Scenario base;
  SweepParameter param = SweepParameter::Alpha;
  AlphaMode mode = AlphaMode::Asymmetric;  // Alpha sweeps only
  std::vector<LinkId> links;               // LinearSlope / Capacity sweeps
  SweepGrid grid;

  /// True when a larger parameter value means more network resources.
  bool resources_increase_with_param() const;
  /// The base scenario with the swept parameter set to v.
  Scenario at(double v) const;
  friend bool operator==(const SweepSpec&, const SweepSpec&) = default;
};

/// Cooperation profile for a scalar degree under the given mode.
CooperationProfile alpha_profile(std::size_t users, AlphaMode mode,
                                 double alpha);

}  // namespace cooproute
