#pragma once

#include <limits>
#include <string>
#include <vector>

namespace cooproute {

/// One cooperative group user and a Wardrop population on two parallel
/// M/M/1 links. The group's operating cost is (1 - alpha) J^group +
/// alpha J^wardrop, with J^wardrop the population's aggregate cost.
struct MixedScenario {
  double c1 = 0.0;
  double c2 = 0.0;
  double r1 = 0.0;  // group demand
  double r2 = 0.0;  // Wardrop mass
  double alpha = 0.0;

  /// Throws ConfigError for nonpositive values or alpha outside [0,1], and
  /// InfeasibleError unless r1 + r2 < c1 + c2.
  void validate() const;
  friend bool operator==(const MixedScenario&, const MixedScenario&) = default;
};

enum class MixedCase { BothLinks, WardropLink1Only, WardropLink2Only };
enum class MixedSubcase { Interior, Boundary };
/// Which coefficient set produced a closed-form candidate for the one-link
/// cases. Derived is the exact group stationarity condition; Statement and
/// Proof reproduce the two alternative coefficient sets for auditing.
enum class CaseVariant { Derived, Statement, Proof };

std::string to_string(MixedCase c);
std::string to_string(MixedSubcase s);
std::string to_string(CaseVariant v);

struct Quadratic {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double discriminant() const { return b * b - 4.0 * a * c; }
  double operator()(double x) const { return (a * x + b) * x + c; }
  /// Real roots in ascending order; handles a == 0.
  std::vector<double> roots() const;
};

struct MixedIntermediates {
  double cc = 0.0;
  double dd = 0.0;
  double a1 = 0.0;  // max(cc, 0)
  double b1 = 0.0;  // min(dd, r1)
  double c1 = 0.0;  // min(cc, r1): upper end of the link-1-only window
  double d1 = 0.0;  // max(dd, 0): lower end of the link-2-only window
  double m1 = 0.0;  // NaN when |2 alpha - 1| < 0.05
  double n1 = 0.0;
  double m2 = std::numeric_limits<double>::quiet_NaN();  // root of h
  double m3 = std::numeric_limits<double>::quiet_NaN();  // root of g
  Quadratic h;      // link-1-only condition, variant of the candidate
  Quadratic g;      // link-2-only condition, variant of the candidate
};

struct MixedVerification {
  double wardrop_gap = 0.0;     // max over used links of T - min T
  double deviation_gain = 0.0;  // best improvement on the 1001-point grid
  double kkt_residual = 0.0;    // derivative condition at the group split
  bool within_bounds = true;
  bool below_capacity = true;
  bool passed = false;
};

struct MixedSolution {
  double group_link1 = 0.0;    // group flow on link 1
  double wardrop_link2 = 0.0;  // Wardrop flow on link 2
  MixedCase kind = MixedCase::BothLinks;
  MixedSubcase subcase = MixedSubcase::Interior;
  CaseVariant variant = CaseVariant::Derived;
  bool rejected = false;
  std::string note;
  MixedIntermediates inter;
  MixedVerification check;
};

struct WardropSplit {
  double link1 = 0.0;
  double link2 = 0.0;
};

/// Wardrop allocation of `mass` given the group's link flows: equal costs
/// when both links are used, else all mass on the cheaper link. Throws
/// InfeasibleError when no split stays below both capacities.
WardropSplit wardrop_split(double c1, double c2, double group1, double group2,
                           double mass);

/// Group's best split on link 1 against a fixed Wardrop allocation.
double group_best_response(const MixedScenario& s, double wardrop_link2);

MixedVerification verify_mixed(const MixedScenario& s, double group_link1,
                               double wardrop_link2, double tol);

struct ClosedFormOptions {
  /// Also emit candidates from the Statement and Proof coefficient sets.
  bool case_audit = false;
  double verify_tolerance = 1e-8;
};

/// Candidates from all three cases, each verified; failures stay in the list
/// with rejected set. Near alpha = 0.5 the interior formula is skipped.
std::vector<MixedSolution> mixed_closed_form(const MixedScenario& s,
                                             const ClosedFormOptions& opt = {});

/// Verified, deduplicated closed-form candidates.
std::vector<MixedSolution> accepted_candidates(
    const std::vector<MixedSolution>& all, double radius = 1e-9);

struct MixedConfig {
  int starts = 201;
  double fixed_point_tolerance = 1e-9;
  int max_alternations = 10000;
  int scan_points = 2001;
  double dedupe_radius = 1e-5;
  double verify_tolerance = 1e-8;
};

struct MixedNumericResult {
  std::vector<MixedSolution> solutions;  // sorted by group flow
  int nonconverged_starts = 0;
  std::vector<std::string> messages;
};

/// Independent solver: alternation from a grid of group splits plus a scan of
/// x -> best_response(wardrop(x)) - x for fixed points the alternation cannot
/// reach. Every returned solution passes verify_mixed.
MixedNumericResult mixed_numeric(const MixedScenario& s,
                                 const MixedConfig& cfg = {});

}  // namespace cooproute
