#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cooproute/cost_function.hpp"
#include "cooproute/ids.hpp"

namespace cooproute {

struct LinkSpec {
  LinkId id;
  NodeId from;
  NodeId to;
  CostSpec cost;
  friend bool operator==(const LinkSpec&, const LinkSpec&) = default;
};

/// Directed graph. Several links may join the same ordered node pair (parallel
/// links) as long as their ids differ. Links are kept sorted by id; every
/// other module addresses links by that index.
class Network {
 public:
  Network() = default;

  std::span<const NodeId> nodes() const { return nodes_; }
  std::span<const LinkSpec> links() const { return links_; }
  std::size_t num_links() const { return links_.size(); }
  const LinkSpec& link(std::size_t index) const { return links_.at(index); }

  bool has_node(NodeId node) const;
  /// Index of the link with this id; throws ConfigError when absent.
  std::size_t link_index(LinkId id) const;
  std::vector<std::size_t> out_links(NodeId node) const;
  std::vector<std::size_t> in_links(NodeId node) const;

  /// Copy with one link's cost replaced.
  Network with_cost(LinkId id, CostSpec cost) const;

  friend bool operator==(const Network&, const Network&) = default;

 private:
  friend Network build_network(std::vector<NodeId> nodes,
                               std::vector<LinkSpec> links);
  std::vector<NodeId> nodes_;
  std::vector<LinkSpec> links_;
};

/// Validates and builds. Rejects duplicate node or link ids, undeclared
/// endpoints, self-loops and bad costs.
Network build_network(std::vector<NodeId> nodes, std::vector<LinkSpec> links);

struct UserSpec {
  UserId id;
  NodeId source;
  NodeId dest;
  double demand = 0.0;
  friend bool operator==(const UserSpec&, const UserSpec&) = default;
};

/// Sequence of link indices from source to destination.
using Path = std::vector<std::size_t>;
/// Per user, the ordered list of simple paths.
using PathSet = std::vector<std::vector<Path>>;

inline constexpr std::size_t kDefaultPathCap = 64;

/// All simple paths from source to dest, ordered lexicographically by link id.
/// Throws ConfigError when none exists or more than `cap` exist.
std::vector<Path> enumerate_paths(const Network& net, NodeId source,
                                  NodeId dest,
                                  std::size_t cap = kDefaultPathCap);

/// Checks each user (demand >= 0, endpoints declared, source != dest) and
/// enumerates its paths.
PathSet enumerate_user_paths(const Network& net,
                             std::span<const UserSpec> users,
                             std::size_t cap = kDefaultPathCap);

std::string format_path(const Network& net, const Path& path);

/// Per-user path flows plus the derived per-user and aggregate link flows.
class FlowProfile {
 public:
  FlowProfile() = default;

  /// Derives link flows without validating; solver-internal.
  static FlowProfile from_path_flows(const PathSet& paths,
                                     std::size_t num_links,
                                     std::vector<std::vector<double>> flows);

  std::size_t num_users() const { return path_flows_.size(); }
  std::size_t num_links() const { return link_flows_.size(); }

  const std::vector<std::vector<double>>& path_flows() const {
    return path_flows_;
  }
  std::span<const double> path_flows(std::size_t user) const {
    return path_flows_.at(user);
  }
  /// f^i_l
  double user_link_flow(std::size_t user, std::size_t link) const {
    return user_link_flows_[user * link_flows_.size() + link];
  }
  std::span<const double> user_link_flows(std::size_t user) const {
    return {user_link_flows_.data() + user * link_flows_.size(),
            link_flows_.size()};
  }
  /// f_l
  double link_flow(std::size_t link) const { return link_flows_[link]; }
  std::span<const double> link_flows() const { return link_flows_; }
  /// f^{-i}_l = f_l - f^i_l
  double complement_flow(std::size_t user, std::size_t link) const {
    return link_flows_[link] - user_link_flow(user, link);
  }

  /// Sup-norm distance on per-user link flows.
  double distance(const FlowProfile& other) const;

 private:
  std::vector<std::vector<double>> path_flows_;
  std::vector<double> user_link_flows_;
  std::vector<double> link_flows_;
};

/// Validated construction: vector shapes must match the path set, flows must
/// be nonnegative, and each user's flows must sum to its demand within 1e-12.
FlowProfile assemble_profile(const PathSet& paths,
                             std::vector<std::vector<double>> path_flows,
                             std::span<const UserSpec> users,
                             std::size_t num_links);

struct LinkSlack {
  std::size_t link = 0;
  double capacity = 0.0;
  double flow = 0.0;
  double slack = 0.0;  // C_l - f_l
};

struct FeasibilityReport {
  /// Max |out - in - r^i_v| over nodes, per user.
  std::vector<double> conservation_residual;
  std::vector<LinkSlack> mm1_slack;
  bool feasible = true;
};

FeasibilityReport check_feasibility(const Network& net,
                                    std::span<const UserSpec> users,
                                    const PathSet& paths,
                                    const FlowProfile& profile);

struct DemandCapacityCheck {
  bool ok = true;
  std::string detail;
};

/// Necessary condition for finite cost: for each destination whose incoming
/// links are all M/M/1, total demand into it stays below their summed
/// capacity.
DemandCapacityCheck demand_capacity_check(const Network& net,
                                          std::span<const UserSpec> users);

}  // namespace cooproute
