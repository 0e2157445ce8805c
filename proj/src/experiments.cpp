#include "cooproute/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "cooproute/error.hpp"

namespace cooproute {

namespace {

std::vector<UserSpec> two_users(NodeId s1, NodeId s2, NodeId dest, double r1,
                                double r2) {
  return {{UserId{1}, s1, dest, r1}, {UserId{2}, s2, dest, r2}};
}

Preset nash_preset(std::string name, std::string description, Topology topo,
                   Network net, std::vector<UserSpec> users) {
  Preset p;
  p.name = name;
  p.description = std::move(description);
  p.sweep.base.name = std::move(name);
  p.sweep.base.topology = topo;
  p.sweep.base.network = std::move(net);
  p.sweep.base.users = std::move(users);
  p.sweep.base.coop = CooperationProfile::selfish(p.sweep.base.users.size());
  p.sweep.param = SweepParameter::Alpha;
  p.sweep.mode = AlphaMode::Asymmetric;
  p.sweep.grid = {0.0, 1.0, 0.01};
  return p;
}

void finish(Preset& p) {
  p.sweep.base.assumed = p.assumed;
  p.feasibility = demand_capacity_check(p.sweep.base.network,
                                        p.sweep.base.users);
}

Preset load_balancing_preset(std::string name, std::string description,
                             const CostSpec& l1, const CostSpec& l2,
                             const CostSpec& cross, double r1, double r2) {
  return nash_preset(std::move(name), std::move(description),
                     Topology::LoadBalancing,
                     load_balancing_network(l1, l2, cross, cross),
                     two_users(NodeId{1}, NodeId{2}, NodeId{3}, r1, r2));
}

Preset parallel_preset(std::string name, std::string description,
                       const CostSpec& l1, const CostSpec& l2) {
  return nash_preset(std::move(name), std::move(description),
                     Topology::Parallel, parallel_network(l1, l2),
                     two_users(NodeId{1}, NodeId{1}, NodeId{2}, 1.0, 1.0));
}

Preset braess_preset(std::string name, std::string description,
                     double alpha1, double alpha2) {
  Preset p = load_balancing_preset(std::move(name), std::move(description),
                                   MM1Cost{4.1}, MM1Cost{4.1}, MM1Cost{0.0},
                                   2.0, 1.0);
  const std::vector<double> alphas{alpha1, alpha2};
  p.sweep.base.coop = CooperationProfile::from_degrees(alphas);
  p.kind = PresetKind::ParameterSweep;
  p.sweep.param = SweepParameter::Capacity;
  p.sweep.links = {LinkId{3}, LinkId{4}};
  p.sweep.grid = {0.0, 10.0, 0.5};
  p.assumed.push_back({"sweep.step", "0.5",
                       "only the end points 0 and 10 of the capacity sweep "
                       "are given"});
  p.assumed.push_back({"links.3/4.capacity at sweep start", "0",
                       "an absent cross link is modelled as zero capacity"});
  return p;
}

double components_distance(const FlowProfile& a, const FlowProfile& b) {
  return a.distance(b);
}

}  // namespace

std::vector<std::string> preset_names(bool include_variants) {
  std::vector<std::string> names{"exp1", "exp2",           "exp3",
                                 "exp4", "exp5",           "braess-lb-asym",
                                 "braess-lb-sym", "mixed-fig7"};
  if (include_variants) {
    names.insert(names.begin() + 3, "exp3-text");
    names.insert(names.begin() + 5, "exp4-feasible");
  }
  return names;
}

Preset preset(const std::string& name) {
  const Assumption g_zero{"links.1/2.g", "0",
                          "intercepts are not given; the no-cross-link cost "
                          "J=1 under a=1 implies zero intercepts"};
  const Assumption unit_demand{"users.demand", "1, 1",
                               "demands are not given; unit demands match the "
                               "no-cross-link cost J=1"};
  Preset p;
  if (name == "exp1") {
    p = load_balancing_preset(name,
                              "load balancing, linear costs a=1, c=0, d=0.5",
                              LinearCost{1.0, 0.0}, LinearCost{1.0, 0.0},
                              LinearCost{0.0, 0.5}, 1.0, 1.0);
    p.assumed = {g_zero, unit_demand};
  } else if (name == "exp2") {
    p = parallel_preset(name, "parallel links, linear costs a=1",
                        LinearCost{1.0, 0.0}, LinearCost{1.0, 0.0});
    p.assumed = {g_zero, unit_demand};
  } else if (name == "exp3") {
    p = load_balancing_preset(
        name, "load balancing, M/M/1 costs C=(4.1, 4.1, 5, 5), r=(1, 1)",
        MM1Cost{4.1}, MM1Cost{4.1}, MM1Cost{5.0}, 1.0, 1.0);
    p.assumed = {{"links", "mm1 C=(4.1, 4.1, 5, 5), r=(1, 1)",
                  "figure parameters used; the accompanying text lists "
                  "linear parameters instead (preset exp3-text)"}};
  } else if (name == "exp3-text") {
    p = load_balancing_preset(
        name, "load balancing, linear a1=4, g1=1, a2=2, g2=2, r=(1.2, 1)",
        LinearCost{4.0, 1.0}, LinearCost{2.0, 2.0}, LinearCost{0.0, 0.5}, 1.2,
        1.0);
    p.assumed = {{"links.3/4", "linear c=0, d=0.5",
                  "cross-link costs are not given for this variant; taken "
                  "from exp1"}};
  } else if (name == "exp4") {
    p = parallel_preset(name, "parallel links, M/M/1 C=(0.001, 0.001), r=(1, 1)",
                        MM1Cost{0.001}, MM1Cost{0.001});
  } else if (name == "exp4-feasible") {
    p = parallel_preset(name, "parallel links, M/M/1 C=(4.1, 4.1), r=(1, 1)",
                        MM1Cost{4.1}, MM1Cost{4.1});
    p.assumed = {{"links.1/2.capacity", "4.1",
                  "capacities 0.001 cannot carry unit demands; "
                  "corrected variant"}};
  } else if (name == "exp5") {
    p = load_balancing_preset(name,
                              "load balancing, linear a1=a2=4.1, d=0.5, "
                              "alpha=0.93 symmetric, c swept 0..1000",
                              LinearCost{4.1, 0.0}, LinearCost{4.1, 0.0},
                              LinearCost{0.0, 0.5}, 1.0, 1.0);
    p.kind = PresetKind::ParameterSweep;
    p.sweep.base.coop = alpha_profile(2, AlphaMode::Symmetric, 0.93);
    p.sweep.param = SweepParameter::LinearSlope;
    p.sweep.links = {LinkId{3}, LinkId{4}};
    p.sweep.grid = {0.0, 1000.0, 20.0};
    p.assumed = {g_zero, unit_demand};
  } else if (name == "braess-lb-asym") {
    p = braess_preset(name,
                      "load balancing, M/M/1 C1=C2=4.1, r=(2, 1), "
                      "alpha=(0.93, 0), cross capacity swept 0..10",
                      0.93, 0.0);
  } else if (name == "braess-lb-sym") {
    p = braess_preset(name,
                      "load balancing, M/M/1 C1=C2=4.1, r=(2, 1), "
                      "alpha=(0.9, 0.9), cross capacity swept 0..10",
                      0.9, 0.9);
  } else if (name == "mixed-fig7") {
    p.name = name;
    p.description = "group user and Wardrop population, C=(4, 3), r=(1.2, 1)";
    p.kind = PresetKind::Mixed;
    p.mixed = {4.0, 3.0, 1.2, 1.0, 0.0};
    p.mixed_alpha_grid = {0.0, 1.0, 0.01};
    return p;
  } else {
    std::string known;
    for (const auto& n : preset_names(true)) known += (known.empty() ? "" : ", ") + n;
    throw ConfigError("unknown preset '" + name + "' (known: " + known + ")");
  }
  finish(p);
  return p;
}

void assign_tracks(SweepTable& table) {
  int next = 0;
  const SweepPoint* prev = nullptr;
  for (SweepPoint& row : table.rows) {
    if (!row.set) {
      row.track.clear();
      prev = nullptr;
      continue;
    }
    const auto& cur = row.set->equilibria;
    row.track.assign(cur.size(), -1);
    if (prev) {
      const auto& old = prev->set->equilibria;
      std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
      for (std::size_t a = 0; a < old.size(); ++a)
        for (std::size_t b = 0; b < cur.size(); ++b) {
          const double d = components_distance(old[a].profile, cur[b].profile);
          if (d < kTrackRadius) pairs.emplace_back(d, a, b);
        }
      std::sort(pairs.begin(), pairs.end());
      std::vector<char> used(old.size(), 0);
      for (const auto& [d, a, b] : pairs) {
        if (used[a] || row.track[b] >= 0) continue;
        used[a] = 1;
        row.track[b] = prev->track[a];
      }
    }
    for (int& t : row.track)
      if (t < 0) t = next++;
    prev = &row;
  }
}

SweepTable parameter_sweep(const SweepSpec& spec) {
  SweepTable table;
  table.parameter = to_string(spec.param);
  table.resources_increase_with_param = spec.resources_increase_with_param();
  for (const auto& u : spec.base.users) table.users.push_back(u.id);
  for (const auto& l : spec.base.network.links()) table.links.push_back(l.id);
  for (double v : spec.grid.values()) {
    SweepPoint row;
    row.param = v;
    try {
      const Scenario s = spec.at(v);
      row.set = multistart_nash(s.game(), s.solver);
    } catch (const Error& e) {
      row.error = e.what();
    }
    table.rows.push_back(std::move(row));
  }
  assign_tracks(table);
  return table;
}

SweepTable alpha_sweep(const Scenario& base, AlphaMode mode,
                       const SweepGrid& grid) {
  for (double v : grid.values())
    if (v < 0.0 || v > 1.0)
      throw ConfigError("alpha sweep grid must lie in [0, 1]");
  SweepSpec spec;
  spec.base = base;
  spec.param = SweepParameter::Alpha;
  spec.mode = mode;
  spec.grid = grid;
  return parameter_sweep(spec);
}

SweepTable run_sweep(const SweepSpec& spec) {
  if (spec.param == SweepParameter::Alpha)
    return alpha_sweep(spec.base, spec.mode, spec.grid);
  return parameter_sweep(spec);
}

std::string to_string(ParadoxKind k) {
  return k == ParadoxKind::Braess ? "braess" : "cooperation";
}

namespace {

struct TrackPoint {
  std::size_t row;
  const EquilibriumResult* eq;
};

// Per track, its points in grid order.
std::map<int, std::vector<TrackPoint>> tracks_of(const SweepTable& table) {
  std::map<int, std::vector<TrackPoint>> out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (!row.set) continue;
    for (std::size_t c = 0; c < row.set->equilibria.size(); ++c)
      out[row.track[c]].push_back({r, &row.set->equilibria[c]});
  }
  return out;
}

bool has_multiplicity(const SweepTable& table) {
  return std::any_of(table.rows.begin(), table.rows.end(), [](const auto& r) {
    return r.set && r.set->equilibria.size() >= 2;
  });
}

// Maximal runs along `pts` (already in the direction of interest) where
// `worse(prev, next)` holds at every step and rows are adjacent.
template <class Step>
void runs(const SweepTable& table, const std::vector<TrackPoint>& pts,
          int track, int user, Step step, std::vector<Witness>& out) {
  std::size_t start = 0;
  auto close = [&](std::size_t end) {
    if (end > start) {
      Witness w;
      w.from = table.rows[pts[start].row].param;
      w.to = table.rows[pts[end].row].param;
      w.points = static_cast<int>(end - start + 1);
      w.track = track;
      w.user = user;
      w.evidence = "continued";
      w.cost_start = pts[start].eq->raw_cost;
      w.cost_end = pts[end].eq->raw_cost;
      out.push_back(std::move(w));
    }
  };
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const bool adjacent =
        pts[i].row + 1 == pts[i - 1].row || pts[i - 1].row + 1 == pts[i].row;
    if (!adjacent || !step(*pts[i - 1].eq, *pts[i].eq)) {
      close(i - 1);
      start = i;
    }
  }
  if (!pts.empty()) close(pts.size() - 1);
}

}  // namespace

ParadoxReport detect_braess(const SweepTable& table) {
  ParadoxReport rep;
  rep.kind = ParadoxKind::Braess;
  rep.direction = table.resources_increase_with_param ? "increasing"
                                                      : "decreasing";
  rep.multiplicity_in_sweep = has_multiplicity(table);
  auto worse_for_all = [](const std::vector<double>& before,
                          const std::vector<double>& after) {
    for (std::size_t u = 0; u < before.size(); ++u)
      if (!(after[u] > before[u] + kParadoxMargin)) return false;
    return true;
  };

  for (auto& [track, pts] : tracks_of(table)) {
    auto ordered = pts;
    if (!table.resources_increase_with_param)
      std::reverse(ordered.begin(), ordered.end());
    runs(table, ordered, track, -1,
         [&](const EquilibriumResult& a, const EquilibriumResult& b) {
           return worse_for_all(a.raw_cost, b.raw_cost);
         },
         rep.witnesses);
  }

  // Walk the grid in the direction of growing resources.
  std::vector<std::size_t> order(table.rows.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  if (!table.resources_increase_with_param)
    std::reverse(order.begin(), order.end());
  for (std::size_t k = 1; k < order.size(); ++k) {
    const auto& before = table.rows[order[k - 1]];
    const auto& after = table.rows[order[k]];
    if (!before.set || !after.set) continue;
    for (std::size_t c = 0; c < after.set->equilibria.size(); ++c) {
      const auto& eq = after.set->equilibria[c];
      bool present = false;
      bool dominated = true;
      for (const auto& old : before.set->equilibria) {
        if (old.profile.distance(eq.profile) < kTrackRadius) present = true;
        if (!worse_for_all(old.raw_cost, eq.raw_cost)) dominated = false;
      }
      if (present || !dominated) continue;
      Witness w;
      w.from = before.param;
      w.to = after.param;
      w.points = 2;
      w.track = after.track[c];
      w.evidence = "emergent";
      w.cost_start.assign(eq.raw_cost.size(), 0.0);
      for (const auto& old : before.set->equilibria)
        for (std::size_t u = 0; u < eq.raw_cost.size(); ++u)
          w.cost_start[u] = std::max(w.cost_start[u], old.raw_cost[u]);
      w.cost_end = eq.raw_cost;
      rep.witnesses.push_back(std::move(w));
    }
  }
  return rep;
}

ParadoxReport detect_cooperation_paradox(const SweepTable& table,
                                         AlphaMode mode) {
  ParadoxReport rep;
  rep.kind = ParadoxKind::Cooperation;
  rep.direction = "increasing";
  rep.multiplicity_in_sweep = has_multiplicity(table);
  const std::size_t users =
      mode == AlphaMode::Asymmetric ? 1 : table.users.size();
  for (auto& [track, pts] : tracks_of(table)) {
    for (std::size_t u = 0; u < users; ++u) {
      runs(table, pts, track, static_cast<int>(u),
           [u](const EquilibriumResult& a, const EquilibriumResult& b) {
             return b.raw_cost[u] < a.raw_cost[u] - kParadoxMargin;
           },
           rep.witnesses);
    }
  }
  rep.discrepancy = !rep.witnesses.empty() && !rep.multiplicity_in_sweep;
  return rep;
}

std::vector<MixedSweepRow> mixed_alpha_sweep(const MixedScenario& base,
                                             const SweepGrid& grid,
                                             const MixedConfig& cfg) {
  std::vector<MixedSweepRow> out;
  for (double a : grid.values()) {
    MixedSweepRow row;
    row.alpha = a;
    MixedScenario s = base;
    s.alpha = a;
    try {
      row.numeric = mixed_numeric(s, cfg).solutions;
      ClosedFormOptions opt;
      opt.verify_tolerance = cfg.verify_tolerance;
      row.closed_form = accepted_candidates(mixed_closed_form(s, opt));
    } catch (const Error& e) {
      row.error = e.what();
    }
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace cooproute
