#include "cooproute/game.hpp"

#include "cooproute/error.hpp"

namespace cooproute {

Game::Game(Network network, std::vector<UserSpec> users,
           CooperationProfile coop, std::size_t path_cap)
    : network_(std::move(network)),
      users_(std::move(users)),
      coop_(std::move(coop)),
      path_cap_(path_cap) {
  if (coop_.num_users() != users_.size())
    throw ConfigError("cooperation profile size does not match user count");
  paths_ = enumerate_user_paths(network_, users_, path_cap_);
}

FlowProfile Game::profile(std::vector<std::vector<double>> path_flows) const {
  return assemble_profile(paths_, std::move(path_flows), users_,
                          network_.num_links());
}

FlowProfile Game::raw_profile(
    std::vector<std::vector<double>> path_flows) const {
  return FlowProfile::from_path_flows(paths_, network_.num_links(),
                                      std::move(path_flows));
}

std::vector<double> Game::raw_costs(const FlowProfile& p) const {
  std::vector<double> out;
  for (std::size_t u = 0; u < users_.size(); ++u)
    out.push_back(user_cost(network_, p, u));
  return out;
}

std::vector<double> Game::operating_costs(const FlowProfile& p) const {
  const auto raw = raw_costs(p);
  std::vector<double> out;
  for (std::size_t u = 0; u < users_.size(); ++u) {
    double total = 0.0;
    for (std::size_t k = 0; k < users_.size(); ++k) {
      const double w = coop_.weight(u, k);
      if (w != 0.0) total += w * raw[k];
    }
    out.push_back(total);
  }
  return out;
}

Game Game::permuted(std::span<const std::size_t> perm) const {
  if (perm.size() != users_.size())
    throw ConfigError("permutation size does not match user count");
  std::vector<UserSpec> users;
  for (std::size_t j : perm) users.push_back(users_.at(j));
  return Game(network_, std::move(users), coop_.permuted(perm), path_cap_);
}

}  // namespace cooproute
