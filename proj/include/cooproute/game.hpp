#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cooproute/costs.hpp"
#include "cooproute/network.hpp"

namespace cooproute {

/// A routing game: network, users, their enumerated paths and the
/// cooperation blend. Immutable once built.
class Game {
 public:
  Game(Network network, std::vector<UserSpec> users, CooperationProfile coop,
       std::size_t path_cap = kDefaultPathCap);

  const Network& network() const { return network_; }
  std::span<const UserSpec> users() const { return users_; }
  const CooperationProfile& coop() const { return coop_; }
  const PathSet& paths() const { return paths_; }
  std::size_t num_users() const { return users_.size(); }
  std::size_t num_links() const { return network_.num_links(); }

  /// Validated profile from per-user path flows.
  FlowProfile profile(std::vector<std::vector<double>> path_flows) const;
  /// Unvalidated; for solver internals.
  FlowProfile raw_profile(std::vector<std::vector<double>> path_flows) const;

  std::vector<double> raw_costs(const FlowProfile& p) const;
  std::vector<double> operating_costs(const FlowProfile& p) const;

  /// Relabel users: new user j is old user perm[j].
  Game permuted(std::span<const std::size_t> perm) const;

 private:
  Network network_;
  std::vector<UserSpec> users_;
  CooperationProfile coop_;
  PathSet paths_;
  std::size_t path_cap_;
};

}  // namespace cooproute
