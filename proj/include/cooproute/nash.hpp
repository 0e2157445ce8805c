#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "cooproute/game.hpp"

namespace cooproute {

struct SolverConfig {
  double br_tolerance = 1e-10;           // on operating cost
  double fixed_point_tolerance = 1e-8;   // sup-norm on path flows per sweep
  int max_sweeps = 10000;
  int grid_density = 21;                 // split points per user path pair
  double cluster_radius = 1e-4;          // sup-norm on per-user link flows
  double verify_tolerance = 1e-6;
  /// Also run a Newton search for stationary points from every start. Finds
  /// equilibria that best-response dynamics cannot reach.
  bool stationary_search = true;
  std::size_t max_starts = 20000;
  unsigned threads = 0;                  // 0: see resolve_threads
  std::size_t path_cap = kDefaultPathCap;

  /// Throws ConfigError when a tolerance is not positive or density < 2.
  void validate() const;
  friend bool operator==(const SolverConfig&, const SolverConfig&) = default;
};

/// Minimizer of the user's operating cost over its scaled simplex, others
/// fixed. Throws InfeasibleError naming the blocking links when every path
/// of the user is saturated by the other users' flow.
std::vector<double> best_response(const Game& game, const FlowProfile& profile,
                                  std::size_t user, const SolverConfig& cfg);

struct BrOutcome {
  bool converged = false;
  bool oscillating = false;
  FlowProfile profile;  // final profile, converged or not
  int sweeps = 0;
  /// Sup-norm flow change of the most recent sweeps, oldest first.
  std::vector<double> recent_changes;
  std::string message;
};

/// Gauss-Seidel best-response sweeps in ascending user order.
BrOutcome br_dynamics(const Game& game, const FlowProfile& start,
                      const SolverConfig& cfg);

struct StationaryOutcome {
  FlowProfile profile;
  int iterations = 0;
};

/// Semismooth Newton on the natural map of the per-user KKT system. Returns
/// nothing when it fails to reach a residual of 1e-11. A result is only a
/// stationary point; it still needs verify_nash.
std::optional<StationaryOutcome> stationary_search(const Game& game,
                                                   const FlowProfile& start);

struct NashVerification {
  std::vector<double> lambda;          // min path marginal per user
  std::vector<double> kkt_residual;    // max f_p (K_p - lambda) per user
  std::vector<double> deviation_gain;  // best grid improvement per user
  double max_kkt_residual = 0.0;
  double max_deviation_gain = 0.0;
  bool feasible = true;
  bool passed = false;
};

/// Per-user path marginals for every path, indexed [user][path].
std::vector<std::vector<double>> path_marginals(const Game& game,
                                                const FlowProfile& profile);

/// KKT residuals plus a unilateral-deviation grid of 1001 points per user
/// (per vertex segment when a user has more than two paths).
NashVerification verify_nash(const Game& game, const FlowProfile& profile,
                             double tol);

struct EquilibriumResult {
  FlowProfile profile;
  std::vector<double> raw_cost;        // J^i
  std::vector<double> operating_cost;  // \hat J^i
  std::vector<double> lambda;
  double kkt_residual = 0.0;
  double deviation_gain = 0.0;
  int basin_count = 0;       // best-response starts ending here
  int stationary_hits = 0;   // Newton starts ending here
  int iterations = 0;        // sweeps (or Newton steps) of the representative
  double diameter = 0.0;     // largest member distance inside the cluster
};

struct SetDiagnostics {
  std::size_t starts = 0;
  std::size_t br_converged = 0;
  std::size_t br_nonconverged = 0;
  std::size_t br_oscillating = 0;
  std::size_t br_failed = 0;         // start raised an error
  std::size_t stationary_converged = 0;
  std::size_t rejected = 0;          // candidates failing verification
  std::vector<std::string> messages;
};

struct EquilibriumSet {
  std::vector<EquilibriumResult> equilibria;  // sorted by \hat J^1
  SetDiagnostics diagnostics;
};

/// Verified equilibrium record for a profile (no basin information).
EquilibriumResult make_result(const Game& game, FlowProfile profile,
                              double tol);

/// Starting profiles: the product of per-user split grids, thinned evenly to
/// at most cfg.max_starts.
std::vector<FlowProfile> start_grid(const Game& game, const SolverConfig& cfg);

/// Throws InfeasibleError when demand cannot fit under capacity and
/// ConvergenceError when no start yields a verified equilibrium.
EquilibriumSet multistart_nash(const Game& game, const SolverConfig& cfg);

}  // namespace cooproute
