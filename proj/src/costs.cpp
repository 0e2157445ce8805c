#include "cooproute/costs.hpp"

#include <cmath>
#include <sstream>

#include "cooproute/error.hpp"

namespace cooproute {

namespace {

// f * T with the convention that zero flow costs nothing.
double weighted_cost(double weight, double unit_cost) {
  return weight == 0.0 ? 0.0 : weight * unit_cost;
}

}  // namespace

CooperationProfile CooperationProfile::from_matrix(
    std::vector<std::vector<double>> rows) {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.size())
      throw ConfigError("cooperation matrix must be square");
    double sum = 0.0;
    for (double w : rows[i]) {
      if (!(w >= 0.0 && w <= 1.0))
        throw ConfigError("cooperation weights must lie in [0, 1]");
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
      std::ostringstream os;
      os << "cooperation row " << i << " sums to " << sum << ", expected 1";
      throw ConfigError(os.str());
    }
  }
  CooperationProfile c;
  c.rows_ = std::move(rows);
  return c;
}

CooperationProfile CooperationProfile::from_degrees(
    std::span<const double> alphas) {
  const std::size_t n = alphas.size();
  std::vector<std::vector<double>> rows(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    const double a = alphas[i];
    if (!(a >= 0.0 && a <= 1.0))
      throw ConfigError("degree of cooperation must lie in [0, 1]");
    if (n == 1) {
      rows[i][i] = 1.0;
      continue;
    }
    for (std::size_t k = 0; k < n; ++k)
      rows[i][k] = (k == i) ? 1.0 - a : a / static_cast<double>(n - 1);
  }
  return from_matrix(std::move(rows));
}

CooperationProfile CooperationProfile::selfish(std::size_t num_users) {
  std::vector<double> zeros(num_users, 0.0);
  return from_degrees(zeros);
}

CooperationProfile CooperationProfile::permuted(
    std::span<const std::size_t> perm) const {
  CooperationProfile c;
  c.rows_.assign(perm.size(), std::vector<double>(perm.size(), 0.0));
  for (std::size_t i = 0; i < perm.size(); ++i)
    for (std::size_t k = 0; k < perm.size(); ++k)
      c.rows_[i][k] = rows_[perm[i]][perm[k]];
  return c;
}

double user_cost(const Network& net, const FlowProfile& profile,
                 std::size_t user) {
  double total = 0.0;
  for (std::size_t l = 0; l < net.num_links(); ++l) {
    const double mine = profile.user_link_flow(user, l);
    if (mine == 0.0) continue;
    total += weighted_cost(mine, link_cost(net.link(l).cost, profile.link_flow(l)));
  }
  return total;
}

double operating_cost(const Network& net, const FlowProfile& profile,
                      const CooperationProfile& coop, std::size_t user) {
  double total = 0.0;
  for (std::size_t k = 0; k < coop.num_users(); ++k) {
    const double w = coop.weight(user, k);
    if (w == 0.0) continue;
    total += w * user_cost(net, profile, k);
  }
  return total;
}

double marginal_cost(const Network& net, const FlowProfile& profile,
                     const CooperationProfile& coop, std::size_t user,
                     std::size_t link) {
  const CostSpec& spec = net.link(link).cost;
  const double f = profile.link_flow(link);
  double blended = 0.0;
  for (std::size_t k = 0; k < coop.num_users(); ++k)
    blended += coop.weight(user, k) * profile.user_link_flow(k, link);
  const double t = link_cost(spec, f);
  const double dt = link_cost_derivative(spec, f);
  return weighted_cost(coop.weight(user, user), t) + weighted_cost(blended, dt);
}

double path_marginal_cost(const Network& net, const FlowProfile& profile,
                          const CooperationProfile& coop, std::size_t user,
                          const Path& path) {
  double total = 0.0;
  for (std::size_t l : path) total += marginal_cost(net, profile, coop, user, l);
  return total;
}

CostReport cost_report(const Network& net, const FlowProfile& profile,
                       const CooperationProfile& coop) {
  CostReport r;
  const std::size_t n = profile.num_users();
  r.link_share.assign(n, std::vector<double>(net.num_links(), 0.0));
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t l = 0; l < net.num_links(); ++l)
      r.link_share[u][l] =
          weighted_cost(profile.user_link_flow(u, l),
                        link_cost(net.link(l).cost, profile.link_flow(l)));
    r.raw.push_back(user_cost(net, profile, u));
  }
  for (std::size_t u = 0; u < n; ++u) {
    double total = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double w = coop.weight(u, k);
      if (w != 0.0) total += w * r.raw[k];
    }
    r.operating.push_back(total);
  }
  return r;
}

}  // namespace cooproute
