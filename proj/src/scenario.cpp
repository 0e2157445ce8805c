#include "cooproute/scenario.hpp"

#include <cmath>

#include "cooproute/error.hpp"

namespace cooproute {

std::string to_string(Topology t) {
  switch (t) {
    case Topology::Parallel: return "parallel";
    case Topology::LoadBalancing: return "load_balancing";
    case Topology::Custom: return "custom";
  }
  return "custom";
}

Topology topology_from_string(const std::string& s) {
  if (s == "parallel") return Topology::Parallel;
  if (s == "load_balancing") return Topology::LoadBalancing;
  if (s == "custom") return Topology::Custom;
  throw ConfigError("topology must be parallel, load_balancing or custom");
}

Network parallel_network(const CostSpec& l1, const CostSpec& l2) {
  return build_network({NodeId{1}, NodeId{2}},
                       {{LinkId{1}, NodeId{1}, NodeId{2}, l1},
                        {LinkId{2}, NodeId{1}, NodeId{2}, l2}});
}

Network load_balancing_network(const CostSpec& l1, const CostSpec& l2,
                               const CostSpec& l3, const CostSpec& l4) {
  return build_network({NodeId{1}, NodeId{2}, NodeId{3}},
                       {{LinkId{1}, NodeId{1}, NodeId{3}, l1},
                        {LinkId{2}, NodeId{2}, NodeId{3}, l2},
                        {LinkId{3}, NodeId{1}, NodeId{2}, l3},
                        {LinkId{4}, NodeId{2}, NodeId{1}, l4}});
}

std::string to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::Alpha: return "alpha";
    case SweepParameter::LinearSlope: return "linear_slope";
    case SweepParameter::Capacity: return "capacity";
  }
  return "alpha";
}

SweepParameter sweep_parameter_from_string(const std::string& s) {
  if (s == "alpha") return SweepParameter::Alpha;
  if (s == "linear_slope") return SweepParameter::LinearSlope;
  if (s == "capacity") return SweepParameter::Capacity;
  throw ConfigError("sweep.param must be alpha, linear_slope or capacity");
}

std::string to_string(AlphaMode m) {
  return m == AlphaMode::Symmetric ? "symmetric" : "asymmetric";
}

AlphaMode alpha_mode_from_string(const std::string& s) {
  if (s == "symmetric") return AlphaMode::Symmetric;
  if (s == "asymmetric") return AlphaMode::Asymmetric;
  throw ConfigError("sweep.mode must be symmetric or asymmetric");
}

std::vector<double> SweepGrid::values() const {
  if (!std::isfinite(from) || !std::isfinite(to) || !(step > 0.0) ||
      !std::isfinite(step))
    throw ConfigError("sweep grid needs finite bounds and step > 0");
  if (to < from) throw ConfigError("sweep grid needs to >= from");
  const double span = (to - from) / step;
  const auto last = static_cast<long>(std::floor(span + 1e-9));
  std::vector<double> out;
  for (long k = 0; k <= last; ++k)
    out.push_back(k == last && std::abs(span - static_cast<double>(last)) <= 1e-9
                      ? to
                      : from + static_cast<double>(k) * step);
  return out;
}

bool SweepSpec::resources_increase_with_param() const {
  return param == SweepParameter::Capacity;
}

CooperationProfile alpha_profile(std::size_t users, AlphaMode mode,
                                 double alpha) {
  std::vector<double> alphas(users, 0.0);
  for (std::size_t u = 0; u < users; ++u)
    if (mode == AlphaMode::Symmetric || u == 0) alphas[u] = alpha;
  return CooperationProfile::from_degrees(alphas);
}

Scenario SweepSpec::at(double v) const {
  Scenario s = base;
  switch (param) {
    case SweepParameter::Alpha:
      s.coop = alpha_profile(s.users.size(), mode, v);
      break;
    case SweepParameter::LinearSlope:
      for (LinkId id : links) {
        const auto& link = s.network.link(s.network.link_index(id));
        const auto* lin = std::get_if<LinearCost>(&link.cost);
        if (!lin) throw ConfigError("linear_slope sweep on a non-linear link");
        s.network = s.network.with_cost(id, LinearCost{v, lin->intercept});
      }
      break;
    case SweepParameter::Capacity:
      for (LinkId id : links) {
        const auto& link = s.network.link(s.network.link_index(id));
        if (!std::holds_alternative<MM1Cost>(link.cost))
          throw ConfigError("capacity sweep on a non-mm1 link");
        s.network = s.network.with_cost(id, MM1Cost{v});
      }
      break;
  }
  return s;
}

}  // namespace cooproute
