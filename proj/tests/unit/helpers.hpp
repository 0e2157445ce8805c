#pragma once

#include <vector>

#include "cooproute/experiments.hpp"
#include "cooproute/game.hpp"
#include "cooproute/scenario.hpp"

namespace testing {

using namespace cooproute;

inline std::vector<UserSpec> users_to(NodeId dest,
                                      std::vector<std::pair<int, double>> src) {
  std::vector<UserSpec> u;
  for (std::size_t i = 0; i < src.size(); ++i)
    u.push_back({UserId{static_cast<int>(i) + 1}, NodeId{src[i].first}, dest,
                 src[i].second});
  return u;
}

/// Two users routing 1 -> 2 over parallel M/M/1 links, both with degree alpha.
inline Game parallel_mm1(double c1, double c2, double r1, double r2,
                         double alpha1, double alpha2) {
  const std::vector<double> a = {alpha1, alpha2};
  return Game(parallel_network(MM1Cost{c1}, MM1Cost{c2}),
              users_to(NodeId{2}, {{1, r1}, {1, r2}}),
              CooperationProfile::from_degrees(a));
}

/// Load balancing with M/M/1 costs; users 1 and 2 start at nodes 1 and 2.
inline Game load_balancing_mm1(double c12, double c34, double r1, double r2,
                               double alpha1, double alpha2) {
  const std::vector<double> a = {alpha1, alpha2};
  return Game(load_balancing_network(MM1Cost{c12}, MM1Cost{c12}, MM1Cost{c34},
                                     MM1Cost{c34}),
              users_to(NodeId{3}, {{1, r1}, {2, r2}}),
              CooperationProfile::from_degrees(a));
}

/// Split profile for two users with two paths each: x_i on path 0.
inline FlowProfile split(const Game& g, double x1, double x2) {
  const double r1 = g.users()[0].demand;
  const double r2 = g.users()[1].demand;
  return g.profile({{x1, r1 - x1}, {x2, r2 - x2}});
}

}  // namespace testing
