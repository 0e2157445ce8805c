#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cooproute/network.hpp"

namespace cooproute {

/// Row-stochastic weights: row i holds the blend user i applies to every
/// user's raw cost. The scalar degree of cooperation is the weight a user puts
/// on the others, 1 - beta^i_i, so 0 is selfish and 1 is fully altruistic.
class CooperationProfile {
 public:
  CooperationProfile() = default;

  /// Throws ConfigError unless square, entries in [0,1], rows summing to 1
  /// within 1e-12.
  static CooperationProfile from_matrix(std::vector<std::vector<double>> rows);
  /// beta^i_i = 1 - alpha^i, the rest spread evenly over the other users.
  static CooperationProfile from_degrees(std::span<const double> alphas);
  static CooperationProfile selfish(std::size_t num_users);

  std::size_t num_users() const { return rows_.size(); }
  double weight(std::size_t user, std::size_t other) const {
    return rows_[user][other];
  }
  double degree(std::size_t user) const { return 1.0 - rows_[user][user]; }
  const std::vector<std::vector<double>>& rows() const { return rows_; }

  /// Relabels users: new user j is old user perm[j].
  CooperationProfile permuted(std::span<const std::size_t> perm) const;

  friend bool operator==(const CooperationProfile&,
                         const CooperationProfile&) = default;

 private:
  std::vector<std::vector<double>> rows_;
};

/// J^i = sum_l f^i_l T_l(f_l). A link the user does not use contributes 0
/// even when its cost is infinite.
double user_cost(const Network& net, const FlowProfile& profile,
                 std::size_t user);

/// \hat J^i = sum_k beta^i_k J^k.
double operating_cost(const Network& net, const FlowProfile& profile,
                      const CooperationProfile& coop, std::size_t user);

/// K^i_l: derivative of sum_k beta^i_k f^k_l T_l(f_l) with respect to f^i_l.
double marginal_cost(const Network& net, const FlowProfile& profile,
                     const CooperationProfile& coop, std::size_t user,
                     std::size_t link);

/// Sum of K^i_l along a path.
double path_marginal_cost(const Network& net, const FlowProfile& profile,
                          const CooperationProfile& coop, std::size_t user,
                          const Path& path);

struct CostReport {
  std::vector<double> raw;        // J^i
  std::vector<double> operating;  // \hat J^i
  /// f^i_l T_l(f_l), indexed [user][link].
  std::vector<std::vector<double>> link_share;
};

CostReport cost_report(const Network& net, const FlowProfile& profile,
                       const CooperationProfile& coop);

}  // namespace cooproute
