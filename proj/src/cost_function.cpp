#include "cooproute/cost_function.hpp"

#include <cmath>
#include <sstream>

#include "cooproute/error.hpp"

namespace cooproute {

namespace {
template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
}  // namespace

void validate_cost_spec(const CostSpec& spec) {
  std::visit(
      Overloaded{
          [](const LinearCost& c) {
            if (!(c.slope >= 0.0) || !std::isfinite(c.slope))
              throw ConfigError("linear cost slope must be finite and >= 0");
            if (!(c.intercept >= 0.0) || !std::isfinite(c.intercept))
              throw ConfigError(
                  "linear cost intercept must be finite and >= 0");
          },
          [](const MM1Cost& c) {
            if (!(c.capacity >= 0.0) || !std::isfinite(c.capacity))
              throw ConfigError("mm1 capacity must be finite and >= 0");
          }},
      spec);
}

double link_cost(const CostSpec& spec, double flow) {
  return std::visit(Overloaded{[flow](const LinearCost& c) {
                                 return c.slope * flow + c.intercept;
                               },
                               [flow](const MM1Cost& c) {
                                 return flow < c.capacity
                                            ? 1.0 / (c.capacity - flow)
                                            : kInfiniteCost;
                               }},
                    spec);
}

double link_cost_derivative(const CostSpec& spec, double flow) {
  return std::visit(Overloaded{[](const LinearCost& c) { return c.slope; },
                               [flow](const MM1Cost& c) {
                                 if (!(flow < c.capacity)) return kInfiniteCost;
                                 const double gap = c.capacity - flow;
                                 return 1.0 / (gap * gap);
                               }},
                    spec);
}

double link_cost_second_derivative(const CostSpec& spec, double flow) {
  return std::visit(Overloaded{[](const LinearCost&) { return 0.0; },
                               [flow](const MM1Cost& c) {
                                 if (!(flow < c.capacity)) return kInfiniteCost;
                                 const double gap = c.capacity - flow;
                                 return 2.0 / (gap * gap * gap);
                               }},
                    spec);
}

double flow_ceiling(const CostSpec& spec) {
  if (const auto* mm1 = std::get_if<MM1Cost>(&spec)) return mm1->capacity;
  return kInfiniteCost;
}

std::string describe(const CostSpec& spec) {
  std::ostringstream os;
  std::visit(Overloaded{[&os](const LinearCost& c) {
                          os << "linear(a=" << c.slope << ", g=" << c.intercept
                             << ")";
                        },
                        [&os](const MM1Cost& c) {
                          os << "mm1(C=" << c.capacity << ")";
                        }},
             spec);
  return os.str();
}

}  // namespace cooproute
