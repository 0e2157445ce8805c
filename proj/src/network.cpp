#include "cooproute/network.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "cooproute/error.hpp"

namespace cooproute {

bool Network::has_node(NodeId node) const {
  return std::binary_search(nodes_.begin(), nodes_.end(), node);
}

std::size_t Network::link_index(LinkId id) const {
  auto it = std::lower_bound(
      links_.begin(), links_.end(), id,
      [](const LinkSpec& l, LinkId value) { return l.id < value; });
  if (it == links_.end() || it->id != id) {
    std::ostringstream os;
    os << "unknown link id " << id;
    throw ConfigError(os.str());
  }
  return static_cast<std::size_t>(it - links_.begin());
}

std::vector<std::size_t> Network::out_links(NodeId node) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < links_.size(); ++i)
    if (links_[i].from == node) out.push_back(i);
  return out;
}

std::vector<std::size_t> Network::in_links(NodeId node) const {
  std::vector<std::size_t> in;
  for (std::size_t i = 0; i < links_.size(); ++i)
    if (links_[i].to == node) in.push_back(i);
  return in;
}

Network Network::with_cost(LinkId id, CostSpec cost) const {
  validate_cost_spec(cost);
  Network copy = *this;
  copy.links_[link_index(id)].cost = std::move(cost);
  return copy;
}

Network build_network(std::vector<NodeId> nodes, std::vector<LinkSpec> links) {
  std::sort(nodes.begin(), nodes.end());
  if (std::adjacent_find(nodes.begin(), nodes.end()) != nodes.end())
    throw ConfigError("duplicate node id");

  std::sort(links.begin(), links.end(),
            [](const LinkSpec& a, const LinkSpec& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < links.size(); ++i) {
    const LinkSpec& l = links[i];
    std::ostringstream where;
    where << "link " << l.id;
    if (i > 0 && links[i - 1].id == l.id)
      throw ConfigError("duplicate link id " + where.str().substr(5));
    if (!std::binary_search(nodes.begin(), nodes.end(), l.from) ||
        !std::binary_search(nodes.begin(), nodes.end(), l.to)) {
      std::ostringstream os;
      os << where.str() << " references undeclared node "
         << (std::binary_search(nodes.begin(), nodes.end(), l.from) ? l.to
                                                                    : l.from);
      throw ConfigError(os.str());
    }
    if (l.from == l.to) throw ConfigError(where.str() + " is a self-loop");
    try {
      validate_cost_spec(l.cost);
    } catch (const ConfigError& e) {
      throw ConfigError(where.str() + ": " + e.what());
    }
  }

  Network net;
  net.nodes_ = std::move(nodes);
  net.links_ = std::move(links);
  return net;
}

namespace {

void collect_paths(const Network& net, NodeId at, NodeId dest,
                   std::set<NodeId>& visited, Path& current,
                   std::vector<Path>& out, std::size_t cap) {
  if (at == dest) {
    out.push_back(current);
    if (out.size() > cap) {
      std::ostringstream os;
      os << "more than " << cap << " simple paths to node " << dest;
      throw ConfigError(os.str());
    }
    return;
  }
  for (std::size_t li : net.out_links(at)) {
    const NodeId next = net.link(li).to;
    if (visited.contains(next)) continue;
    visited.insert(next);
    current.push_back(li);
    collect_paths(net, next, dest, visited, current, out, cap);
    current.pop_back();
    visited.erase(next);
  }
}

}  // namespace

std::vector<Path> enumerate_paths(const Network& net, NodeId source,
                                  NodeId dest, std::size_t cap) {
  if (source == dest) throw ConfigError("source equals destination");
  if (!net.has_node(source) || !net.has_node(dest))
    throw ConfigError("path endpoint is not a declared node");
  std::vector<Path> out;
  std::set<NodeId> visited{source};
  Path current;
  collect_paths(net, source, dest, visited, current, out, cap);
  if (out.empty()) {
    std::ostringstream os;
    os << "no path from node " << source << " to node " << dest;
    throw ConfigError(os.str());
  }
  // Link indices follow link-id order, so comparing index sequences is the
  // lexicographic order on ids.
  std::sort(out.begin(), out.end());
  return out;
}

PathSet enumerate_user_paths(const Network& net,
                             std::span<const UserSpec> users,
                             std::size_t cap) {
  PathSet paths;
  paths.reserve(users.size());
  for (const UserSpec& u : users) {
    std::ostringstream where;
    where << "user " << u.id;
    if (!(u.demand >= 0.0) || !std::isfinite(u.demand))
      throw ConfigError(where.str() + ": demand must be nonnegative");
    if (u.source == u.dest)
      throw ConfigError(where.str() + ": source equals destination");
    try {
      paths.push_back(enumerate_paths(net, u.source, u.dest, cap));
    } catch (const ConfigError& e) {
      throw ConfigError(where.str() + ": " + e.what());
    }
  }
  return paths;
}

std::string format_path(const Network& net, const Path& path) {
  std::ostringstream os;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i) os << '>';
    os << net.link(path[i]).id;
  }
  return os.str();
}

FlowProfile FlowProfile::from_path_flows(
    const PathSet& paths, std::size_t num_links,
    std::vector<std::vector<double>> flows) {
  FlowProfile p;
  p.path_flows_ = std::move(flows);
  p.user_link_flows_.assign(paths.size() * num_links, 0.0);
  p.link_flows_.assign(num_links, 0.0);
  for (std::size_t u = 0; u < paths.size(); ++u) {
    for (std::size_t k = 0; k < paths[u].size(); ++k) {
      const double x = p.path_flows_[u][k];
      for (std::size_t l : paths[u][k]) p.user_link_flows_[u * num_links + l] += x;
    }
  }
  for (std::size_t u = 0; u < paths.size(); ++u)
    for (std::size_t l = 0; l < num_links; ++l)
      p.link_flows_[l] += p.user_link_flows_[u * num_links + l];
  return p;
}

double FlowProfile::distance(const FlowProfile& other) const {
  double d = 0.0;
  const std::size_t n = std::min(user_link_flows_.size(),
                                 other.user_link_flows_.size());
  for (std::size_t i = 0; i < n; ++i)
    d = std::max(d, std::abs(user_link_flows_[i] - other.user_link_flows_[i]));
  return d;
}

FlowProfile assemble_profile(const PathSet& paths,
                             std::vector<std::vector<double>> path_flows,
                             std::span<const UserSpec> users,
                             std::size_t num_links) {
  if (path_flows.size() != paths.size() || users.size() != paths.size())
    throw ConfigError("path flow vectors do not match the number of users");
  for (std::size_t u = 0; u < paths.size(); ++u) {
    std::ostringstream where;
    where << "user " << users[u].id;
    if (path_flows[u].size() != paths[u].size())
      throw ConfigError(where.str() + ": expected " +
                        std::to_string(paths[u].size()) + " path flows");
    double total = 0.0;
    for (double x : path_flows[u]) {
      if (!(x >= 0.0)) throw ConfigError(where.str() + ": negative path flow");
      total += x;
    }
    if (std::abs(total - users[u].demand) > 1e-12) {
      std::ostringstream os;
      os << where.str() << ": path flows sum to " << total
         << " but demand is " << users[u].demand;
      throw ConfigError(os.str());
    }
  }
  return FlowProfile::from_path_flows(paths, num_links, std::move(path_flows));
}

FeasibilityReport check_feasibility(const Network& net,
                                    std::span<const UserSpec> users,
                                    const PathSet& paths,
                                    const FlowProfile& profile) {
  (void)paths;
  FeasibilityReport report;
  for (std::size_t u = 0; u < users.size(); ++u) {
    double worst = 0.0;
    for (NodeId v : net.nodes()) {
      double balance = 0.0;
      for (std::size_t l : net.out_links(v)) balance += profile.user_link_flow(u, l);
      for (std::size_t l : net.in_links(v)) balance -= profile.user_link_flow(u, l);
      if (v == users[u].source) balance -= users[u].demand;
      if (v == users[u].dest) balance += users[u].demand;
      worst = std::max(worst, std::abs(balance));
    }
    report.conservation_residual.push_back(worst);
  }
  for (std::size_t l = 0; l < net.num_links(); ++l) {
    if (const auto* mm1 = std::get_if<MM1Cost>(&net.link(l).cost)) {
      LinkSlack s{l, mm1->capacity, profile.link_flow(l),
                  mm1->capacity - profile.link_flow(l)};
      // An absent (zero-capacity) link that carries nothing is not a
      // violation.
      if (s.slack <= 0.0 && !(mm1->capacity == 0.0 && s.flow == 0.0))
        report.feasible = false;
      report.mm1_slack.push_back(s);
    }
  }
  return report;
}

DemandCapacityCheck demand_capacity_check(const Network& net,
                                          std::span<const UserSpec> users) {
  std::map<NodeId, std::vector<std::size_t>> users_into;
  for (std::size_t u = 0; u < users.size(); ++u)
    users_into[users[u].dest].push_back(u);
  for (const auto& [dest, members] : users_into) {
    double demand = 0.0;
    std::ostringstream lhs;
    for (std::size_t k = 0; k < members.size(); ++k) {
      demand += users[members[k]].demand;
      lhs << (k ? "+" : "") << "r" << users[members[k]].id;
    }
    double capacity = 0.0;
    bool all_mm1 = true;
    std::ostringstream rhs;
    const auto in = net.in_links(dest);
    for (std::size_t k = 0; k < in.size(); ++k) {
      const double ceiling = flow_ceiling(net.link(in[k]).cost);
      if (std::isinf(ceiling)) {
        all_mm1 = false;
        break;
      }
      capacity += ceiling;
      rhs << (k ? "+" : "") << "C" << net.link(in[k]).id;
    }
    if (all_mm1 && demand > 0.0 && !(demand < capacity)) {
      std::ostringstream os;
      os << "infeasible: " << lhs.str() << " >= " << rhs.str() << " ("
         << demand << " >= " << capacity << ") at destination node " << dest
         << "; M/M/1 costs need total demand below total capacity";
      return {false, os.str()};
    }
  }
  return {};
}

}  // namespace cooproute
