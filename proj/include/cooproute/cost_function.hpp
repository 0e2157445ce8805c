#pragma once

#include <limits>
#include <string>
#include <variant>

namespace cooproute {

/// Cost sentinel for flows at or above an M/M/1 capacity. Propagates through
/// sums and compares greater than every finite cost.
inline constexpr double kInfiniteCost = std::numeric_limits<double>::infinity();

/// Per-unit link cost a*f + g.
struct LinearCost {
  double slope = 0.0;      // a
  double intercept = 0.0;  // g
  friend bool operator==(const LinearCost&, const LinearCost&) = default;
};

/// M/M/1 delay 1/(C - f). A capacity of zero models an absent link: any
/// positive flow on it costs kInfiniteCost.
struct MM1Cost {
  double capacity = 0.0;
  friend bool operator==(const MM1Cost&, const MM1Cost&) = default;
};

using CostSpec = std::variant<LinearCost, MM1Cost>;

/// Throws ConfigError when the parameters are out of range.
void validate_cost_spec(const CostSpec& spec);

/// Cost per unit of flow at aggregate flow f.
double link_cost(const CostSpec& spec, double flow);

/// dT/df at aggregate flow f; kInfiniteCost at or above capacity.
double link_cost_derivative(const CostSpec& spec, double flow);

/// d2T/df2; kInfiniteCost at or above capacity.
double link_cost_second_derivative(const CostSpec& spec, double flow);

/// Largest aggregate flow the link can carry with finite cost, or +inf.
double flow_ceiling(const CostSpec& spec);

std::string describe(const CostSpec& spec);

}  // namespace cooproute
