#include "cooproute/nash.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "cooproute/error.hpp"
#include "cooproute/parallel.hpp"

namespace cooproute {

namespace {

constexpr double kCapacityMargin = 1e-9;
constexpr double kStationaryTolerance = 1e-11;
constexpr int kStationaryMaxIterations = 60;
constexpr double kPolishRadius = 1e-6;
constexpr int kDeviationPoints = 1001;

double weighted(double w, double v) { return w == 0.0 ? 0.0 : w * v; }

// User i's objective with everyone else frozen: sum_l (b x_l + W_l) T(x_l + O_l)
// where x is the user's own link flow.
class UserObjective {
 public:
  UserObjective(const Game& game, const FlowProfile& profile, std::size_t user)
      : net_(game.network()),
        paths_(game.paths()[user]),
        self_(game.coop().weight(user, user)),
        others_(game.num_links(), 0.0),
        blend_(game.num_links(), 0.0) {
    for (std::size_t l = 0; l < game.num_links(); ++l) {
      others_[l] = profile.complement_flow(user, l);
      for (std::size_t k = 0; k < game.num_users(); ++k)
        if (k != user)
          blend_[l] += weighted(game.coop().weight(user, k),
                                profile.user_link_flow(k, l));
    }
  }

  const std::vector<Path>& paths() const { return paths_; }

  std::vector<double> link_flows(std::span<const double> path_flows) const {
    std::vector<double> x(net_.num_links(), 0.0);
    for (std::size_t p = 0; p < paths_.size(); ++p)
      for (std::size_t l : paths_[p]) x[l] += path_flows[p];
    return x;
  }

  double link_marginal(std::size_t l, double x) const {
    const CostSpec& spec = net_.link(l).cost;
    const double f = x + others_[l];
    return weighted(self_, link_cost(spec, f)) +
           weighted(self_ * x + blend_[l], link_cost_derivative(spec, f));
  }

  double path_marginal(std::size_t p, const std::vector<double>& x) const {
    double total = 0.0;
    for (std::size_t l : paths_[p]) total += link_marginal(l, x[l]);
    return total;
  }

  double cost(const std::vector<double>& x) const {
    double total = 0.0;
    for (std::size_t l = 0; l < x.size(); ++l) {
      const double share = self_ * x[l] + blend_[l];
      if (share == 0.0) continue;
      total += share * link_cost(net_.link(l).cost, x[l] + others_[l]);
    }
    return total;
  }

  double cost_of_paths(std::span<const double> path_flows) const {
    return cost(link_flows(path_flows));
  }

  double headroom(std::size_t l, double x) const {
    return flow_ceiling(net_.link(l).cost) - kCapacityMargin - x - others_[l];
  }

  std::string blocking_links() const {
    std::ostringstream os;
    bool first = true;
    for (std::size_t l = 0; l < net_.num_links(); ++l) {
      if (others_[l] >= flow_ceiling(net_.link(l).cost)) {
        os << (first ? "" : ", ") << net_.link(l).id;
        first = false;
      }
    }
    return first ? std::string("none") : os.str();
  }

 private:
  const Network& net_;
  const std::vector<Path>& paths_;
  double self_;
  std::vector<double> others_;
  std::vector<double> blend_;
};

bool on_path(const Path& p, std::size_t l) {
  return std::find(p.begin(), p.end(), l) != p.end();
}

double sup_diff(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

double sup_diff(const std::vector<std::vector<double>>& a,
                const std::vector<std::vector<double>>& b) {
  double d = 0.0;
  for (std::size_t u = 0; u < a.size(); ++u)
    d = std::max(d, sup_diff(a[u], b[u]));
  return d;
}

// Euclidean projection onto {x >= 0, sum x = mass}.
std::vector<double> project_simplex(std::span<const double> v, double mass) {
  std::vector<double> u(v.begin(), v.end());
  std::sort(u.begin(), u.end(), std::greater<>());
  double running = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    running += u[j];
    const double t = (running - mass) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) theta = t;
  }
  std::vector<double> x(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) x[i] = std::max(v[i] - theta, 0.0);
  return x;
}

// Natural-map residual F(z) = z - proj(z - phi(z)) and its semismooth
// Jacobian. Paths with infinite marginal are pinned at zero.
struct NaturalMap {
  const Game& game;
  std::vector<std::size_t> offset;
  std::size_t dim = 0;

  explicit NaturalMap(const Game& g) : game(g) {
    for (const auto& ps : g.paths()) {
      offset.push_back(dim);
      dim += ps.size();
    }
  }

  std::vector<std::vector<double>> split(const Eigen::VectorXd& z) const {
    std::vector<std::vector<double>> flows;
    for (std::size_t u = 0; u < game.num_users(); ++u) {
      const std::size_t n = game.paths()[u].size();
      flows.emplace_back(z.data() + offset[u], z.data() + offset[u] + n);
    }
    return flows;
  }

  // Returns false when the residual is not finite.
  bool eval(const Eigen::VectorXd& z, Eigen::VectorXd& F, Eigen::MatrixXd* J,
            std::vector<std::vector<double>>* projected) const {
    const auto flows = split(z);
    const FlowProfile prof = game.raw_profile(flows);
    const auto phi = path_marginals(game, prof);
    F.resize(static_cast<Eigen::Index>(dim));
    std::vector<std::vector<char>> active(game.num_users());
    if (projected) projected->clear();
    for (std::size_t u = 0; u < game.num_users(); ++u) {
      const std::size_t n = flows[u].size();
      std::vector<double> arg(n);
      for (std::size_t p = 0; p < n; ++p) {
        if (!std::isfinite(phi[u][p]) && flows[u][p] > 0.0) return false;
        arg[p] = std::isfinite(phi[u][p]) ? flows[u][p] - phi[u][p]
                                           : -kInfiniteCost;
      }
      const auto x = project_simplex(arg, game.users()[u].demand);
      active[u].assign(n, 0);
      for (std::size_t p = 0; p < n; ++p) {
        F[static_cast<Eigen::Index>(offset[u] + p)] = flows[u][p] - x[p];
        active[u][p] = x[p] > 0.0;
      }
      if (projected) projected->push_back(x);
    }
    if (!F.allFinite()) return false;
    if (!J) return true;

    const Network& net = game.network();
    const CooperationProfile& coop = game.coop();
    const std::size_t users = game.num_users();
    const std::size_t links = net.num_links();
    // dK^i_l / df^j_l
    std::vector<double> dk(users * users * links, 0.0);
    for (std::size_t l = 0; l < links; ++l) {
      const CostSpec& spec = net.link(l).cost;
      const double f = prof.link_flow(l);
      const double d1 = link_cost_derivative(spec, f);
      const double d2 = link_cost_second_derivative(spec, f);
      for (std::size_t i = 0; i < users; ++i) {
        double blend = 0.0;
        for (std::size_t k = 0; k < users; ++k)
          blend += coop.weight(i, k) * prof.user_link_flow(k, l);
        for (std::size_t j = 0; j < users; ++j) {
          const double v = weighted(coop.weight(i, i) + coop.weight(i, j), d1) +
                           weighted(blend, d2);
          dk[(i * users + j) * links + l] = std::isfinite(v) ? v : 0.0;
        }
      }
    }
    Eigen::MatrixXd jphi = Eigen::MatrixXd::Zero(dim, dim);
    for (std::size_t i = 0; i < users; ++i) {
      for (std::size_t p = 0; p < game.paths()[i].size(); ++p) {
        if (!std::isfinite(phi[i][p])) continue;
        for (std::size_t j = 0; j < users; ++j) {
          for (std::size_t q = 0; q < game.paths()[j].size(); ++q) {
            double s = 0.0;
            for (std::size_t l : game.paths()[i][p])
              if (on_path(game.paths()[j][q], l))
                s += dk[(i * users + j) * links + l];
            jphi(static_cast<Eigen::Index>(offset[i] + p),
                 static_cast<Eigen::Index>(offset[j] + q)) = s;
          }
        }
      }
    }
    Eigen::MatrixXd proj = Eigen::MatrixXd::Zero(dim, dim);
    for (std::size_t u = 0; u < users; ++u) {
      const auto& act = active[u];
      const double count =
          static_cast<double>(std::count(act.begin(), act.end(), 1));
      if (count == 0.0) continue;
      for (std::size_t a = 0; a < act.size(); ++a)
        for (std::size_t b = 0; b < act.size(); ++b)
          if (act[a] && act[b])
            proj(static_cast<Eigen::Index>(offset[u] + a),
                 static_cast<Eigen::Index>(offset[u] + b)) =
                (a == b ? 1.0 : 0.0) - 1.0 / count;
    }
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(dim, dim);
    *J = eye - proj * (eye - jphi);
    return true;
  }
};

std::vector<std::vector<double>> user_grid(std::size_t paths, double demand,
                                           int density) {
  std::vector<std::vector<double>> out;
  if (paths == 1) return {{demand}};
  if (paths == 2) {
    const int m = density - 1;
    for (int k = 0; k <= m; ++k) {
      const double a = demand * static_cast<double>(k) / m;
      out.push_back({a, k == m ? 0.0 : demand - a});
    }
    return out;
  }
  // Simplex lattice with m divisions, m reduced until it has <= 4096 points.
  auto count = [paths](int m) {
    double c = 1.0;
    for (std::size_t i = 1; i < paths; ++i)
      c = c * static_cast<double>(m + static_cast<int>(i)) /
          static_cast<double>(i);
    return c;
  };
  int m = density - 1;
  while (m > 1 && count(m) > 4096.0) --m;
  std::vector<int> parts(paths, 0);
  auto emit = [&](auto&& self, std::size_t idx, int left) -> void {
    if (idx + 1 == paths) {
      parts[idx] = left;
      std::vector<double> v;
      for (int c : parts) v.push_back(demand * static_cast<double>(c) / m);
      out.push_back(std::move(v));
      return;
    }
    for (int c = left; c >= 0; --c) {
      parts[idx] = c;
      self(self, idx + 1, left - c);
    }
  };
  emit(emit, 0, m);
  return out;
}

bool lex_less(const FlowProfile& a, const FlowProfile& b) {
  const auto& x = a.path_flows();
  const auto& y = b.path_flows();
  for (std::size_t u = 0; u < x.size(); ++u)
    for (std::size_t p = 0; p < x[u].size(); ++p)
      if (x[u][p] != y[u][p]) return x[u][p] < y[u][p];
  return false;
}

}  // namespace

void SolverConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw ConfigError(std::string("solver.") + name + " must be positive");
  };
  positive(br_tolerance, "br_tolerance");
  positive(fixed_point_tolerance, "fixed_point_tolerance");
  positive(cluster_radius, "cluster_radius");
  positive(verify_tolerance, "verify_tolerance");
  if (max_sweeps < 1) throw ConfigError("solver.max_sweeps must be >= 1");
  if (grid_density < 2) throw ConfigError("solver.grid_density must be >= 2");
  if (max_starts < 1) throw ConfigError("solver.max_starts must be >= 1");
  if (path_cap < 1) throw ConfigError("solver.path_cap must be >= 1");
}

std::vector<double> best_response(const Game& game, const FlowProfile& profile,
                                  std::size_t user, const SolverConfig& cfg) {
  const UserObjective obj(game, profile, user);
  const auto& paths = obj.paths();
  std::vector<double> p(profile.path_flows(user).begin(),
                        profile.path_flows(user).end());
  const std::size_t n = paths.size();
  std::vector<double> x = obj.link_flows(p);
  std::vector<double> k(n);

  for (int iter = 0; iter < 10000; ++iter) {
    for (std::size_t q = 0; q < n; ++q) k[q] = obj.path_marginal(q, x);
    std::size_t best = 0;
    for (std::size_t q = 1; q < n; ++q)
      if (k[q] < k[best]) best = q;
    if (!std::isfinite(k[best])) {
      std::ostringstream os;
      os << "user " << game.users()[user].id
         << ": every path is saturated; blocking links: "
         << obj.blocking_links();
      throw InfeasibleError(os.str());
    }
    std::size_t worst = n;
    double gap = 0.0;
    for (std::size_t q = 0; q < n; ++q) {
      if (p[q] <= 0.0) continue;
      gap += weighted(p[q], k[q] - k[best]);
      if (worst == n || k[q] > k[worst]) worst = q;
    }
    if (worst == n || worst == best || !(k[worst] > k[best])) break;
    if (gap <= cfg.br_tolerance) break;

    double tmax = p[worst];
    for (std::size_t l : paths[best])
      if (!on_path(paths[worst], l)) tmax = std::min(tmax, obj.headroom(l, x[l]));
    if (!(tmax > 0.0)) break;

    std::vector<double> xt(x.size());
    auto shifted = [&](double t) {
      xt = x;
      for (std::size_t l : paths[best]) xt[l] += t;
      for (std::size_t l : paths[worst]) xt[l] -= t;
    };
    auto slope = [&](double t) {
      shifted(t);
      const double g = obj.path_marginal(best, xt) - obj.path_marginal(worst, xt);
      return std::isnan(g) ? kInfiniteCost : g;
    };
    double t = tmax;
    if (slope(tmax) > 0.0) {
      double lo = 0.0;
      double hi = tmax;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (slope(mid) <= 0.0 ? lo : hi) = mid;
      }
      t = 0.5 * (lo + hi);
    }
    if (!(t > 0.0)) break;
    if (t >= p[worst]) {
      t = p[worst];
      p[worst] = 0.0;
    } else {
      p[worst] -= t;
    }
    p[best] += t;
    x = obj.link_flows(p);
    if (n == 2 && iter >= 1) break;
  }
  return p;
}

BrOutcome br_dynamics(const Game& game, const FlowProfile& start,
                      const SolverConfig& cfg) {
  BrOutcome out;
  auto flows = start.path_flows();
  FlowProfile prof = game.raw_profile(flows);
  std::vector<std::vector<std::vector<double>>> past;  // last two sweeps
  for (int sweep = 1; sweep <= cfg.max_sweeps; ++sweep) {
    double change = 0.0;
    for (std::size_t u = 0; u < game.num_users(); ++u) {
      auto next = best_response(game, prof, u, cfg);
      change = std::max(change, sup_diff(next, flows[u]));
      flows[u] = std::move(next);
      prof = game.raw_profile(flows);
    }
    out.sweeps = sweep;
    out.recent_changes.push_back(change);
    if (out.recent_changes.size() > 8)
      out.recent_changes.erase(out.recent_changes.begin());
    if (change < cfg.fixed_point_tolerance) {
      out.converged = true;
      break;
    }
    if (past.size() == 2 &&
        sup_diff(flows, past.front()) < cfg.fixed_point_tolerance &&
        change > 100.0 * cfg.fixed_point_tolerance) {
      out.oscillating = true;
      out.message = "period-2 oscillation after " + std::to_string(sweep) +
                    " sweeps";
      break;
    }
    past.push_back(flows);
    if (past.size() > 2) past.erase(past.begin());
  }
  if (!out.converged && out.message.empty()) {
    std::ostringstream os;
    os << "no fixed point within " << cfg.max_sweeps
       << " sweeps; last change " << out.recent_changes.back();
    out.message = os.str();
  }
  out.profile = std::move(prof);
  return out;
}

std::optional<StationaryOutcome> stationary_search(const Game& game,
                                                   const FlowProfile& start) {
  const NaturalMap map(game);
  Eigen::VectorXd z(static_cast<Eigen::Index>(map.dim));
  for (std::size_t u = 0; u < game.num_users(); ++u)
    for (std::size_t p = 0; p < game.paths()[u].size(); ++p)
      z[static_cast<Eigen::Index>(map.offset[u] + p)] = start.path_flows(u)[p];

  Eigen::VectorXd F;
  Eigen::VectorXd Ft;
  Eigen::MatrixXd J;
  std::vector<std::vector<double>> projected;
  for (int it = 0; it <= kStationaryMaxIterations; ++it) {
    if (!map.eval(z, F, &J, &projected)) return std::nullopt;
    if (F.lpNorm<Eigen::Infinity>() <= kStationaryTolerance)
      return StationaryOutcome{game.raw_profile(std::move(projected)), it};
    const Eigen::VectorXd step = J.colPivHouseholderQr().solve(-F);
    if (!step.allFinite()) return std::nullopt;
    const double merit = F.squaredNorm();
    double t = 1.0;
    for (;;) {
      const Eigen::VectorXd zt = z + t * step;
      if (map.eval(zt, Ft, nullptr, nullptr) &&
          Ft.squaredNorm() <= (1.0 - 1e-4 * t) * merit) {
        z = zt;
        break;
      }
      t *= 0.5;
      if (t < 1e-12) return std::nullopt;
    }
  }
  return std::nullopt;
}

std::vector<std::vector<double>> path_marginals(const Game& game,
                                                const FlowProfile& profile) {
  std::vector<std::vector<double>> out(game.num_users());
  for (std::size_t u = 0; u < game.num_users(); ++u)
    for (const Path& path : game.paths()[u])
      out[u].push_back(path_marginal_cost(game.network(), profile, game.coop(),
                                          u, path));
  return out;
}

NashVerification verify_nash(const Game& game, const FlowProfile& profile,
                             double tol) {
  NashVerification v;
  v.feasible = check_feasibility(game.network(), game.users(), game.paths(),
                                 profile)
                   .feasible;
  const auto k = path_marginals(game, profile);
  for (std::size_t u = 0; u < game.num_users(); ++u) {
    const auto flows = profile.path_flows(u);
    const double lam = *std::min_element(k[u].begin(), k[u].end());
    double res = 0.0;
    for (std::size_t p = 0; p < flows.size(); ++p)
      res = std::max(res, weighted(flows[p], k[u][p] - lam));
    v.lambda.push_back(lam);
    v.kkt_residual.push_back(res);

    const UserObjective obj(game, profile, u);
    const double base = obj.cost_of_paths(flows);
    const double demand = game.users()[u].demand;
    double best = base;
    auto consider = [&](std::span<const double> cand) {
      const double c = obj.cost_of_paths(cand);
      if (c < best) best = c;
    };
    const std::size_t n = flows.size();
    std::vector<double> cand(n);
    if (n == 2) {
      for (int i = 0; i < kDeviationPoints; ++i) {
        cand[0] = demand * i / (kDeviationPoints - 1);
        cand[1] = demand - cand[0];
        consider(cand);
      }
    } else if (n > 2) {
      for (std::size_t vert = 0; vert < n; ++vert) {
        for (int i = 0; i < kDeviationPoints; ++i) {
          const double t = static_cast<double>(i) / (kDeviationPoints - 1);
          for (std::size_t p = 0; p < n; ++p)
            cand[p] = (1.0 - t) * flows[p] + (p == vert ? t * demand : 0.0);
          consider(cand);
        }
      }
    }
    const double gain = std::isfinite(base) ? base - best : kInfiniteCost;
    v.deviation_gain.push_back(gain);
    v.max_kkt_residual = std::max(v.max_kkt_residual, res);
    v.max_deviation_gain = std::max(v.max_deviation_gain, gain);
  }
  v.passed = v.feasible && v.max_kkt_residual <= tol &&
             v.max_deviation_gain <= tol;
  return v;
}

EquilibriumResult make_result(const Game& game, FlowProfile profile,
                              double tol) {
  EquilibriumResult r;
  const auto v = verify_nash(game, profile, tol);
  r.raw_cost = game.raw_costs(profile);
  r.operating_cost = game.operating_costs(profile);
  r.lambda = v.lambda;
  r.kkt_residual = v.max_kkt_residual;
  r.deviation_gain = v.max_deviation_gain;
  r.profile = std::move(profile);
  return r;
}

std::vector<FlowProfile> start_grid(const Game& game, const SolverConfig& cfg) {
  std::vector<std::vector<std::vector<double>>> per_user;
  double total = 1.0;
  for (std::size_t u = 0; u < game.num_users(); ++u) {
    per_user.push_back(user_grid(game.paths()[u].size(),
                                 game.users()[u].demand, cfg.grid_density));
    total *= static_cast<double>(per_user.back().size());
  }
  const double limit = static_cast<double>(cfg.max_starts);
  const std::size_t count =
      static_cast<std::size_t>(std::min(total, limit));
  std::vector<FlowProfile> out;
  out.reserve(count);
  for (std::size_t s = 0; s < count; ++s) {
    // Mixed-radix index, user 0 most significant.
    double idx = total <= limit
                     ? static_cast<double>(s)
                     : std::floor(static_cast<double>(s) * total / limit);
    std::vector<std::vector<double>> flows(game.num_users());
    for (std::size_t u = game.num_users(); u-- > 0;) {
      const double radix = static_cast<double>(per_user[u].size());
      const double digit = std::fmod(idx, radix);
      flows[u] = per_user[u][static_cast<std::size_t>(digit)];
      idx = std::floor(idx / radix);
    }
    out.push_back(game.raw_profile(std::move(flows)));
  }
  return out;
}

EquilibriumSet multistart_nash(const Game& game, const SolverConfig& cfg) {
  cfg.validate();
  const auto capacity = demand_capacity_check(game.network(), game.users());
  if (!capacity.ok) throw InfeasibleError(capacity.detail);

  struct Candidate {
    FlowProfile profile;
    double key = 0.0;
    double kkt = 0.0;
    int iterations = 0;
    std::size_t start = 0;
    bool from_br = false;
  };
  struct Slot {
    std::optional<Candidate> br;
    std::optional<Candidate> newton;
    bool br_converged = false;
    bool oscillating = false;
    bool failed = false;
    int rejected = 0;
    std::string message;
  };

  const auto starts = start_grid(game, cfg);
  std::vector<Slot> slots(starts.size());
  const double tol = cfg.verify_tolerance;

  auto admit = [&](FlowProfile prof, int iterations, std::size_t start,
                   bool from_br, Slot& slot) -> std::optional<Candidate> {
    const auto k = path_marginals(game, prof);
    double kkt = 0.0;
    for (std::size_t u = 0; u < game.num_users(); ++u) {
      const double lam = *std::min_element(k[u].begin(), k[u].end());
      for (std::size_t p = 0; p < k[u].size(); ++p)
        kkt = std::max(kkt, weighted(prof.path_flows(u)[p], k[u][p] - lam));
    }
    if (!(kkt <= tol)) {
      ++slot.rejected;
      return std::nullopt;
    }
    const double key = game.operating_costs(prof)[0];
    return Candidate{std::move(prof), key, kkt, iterations, start, from_br};
  };

  parallel_for(starts.size(), resolve_threads(cfg.threads), [&](std::size_t i) {
    Slot& slot = slots[i];
    try {
      BrOutcome out = br_dynamics(game, starts[i], cfg);
      if (out.converged) {
        slot.br_converged = true;
        FlowProfile prof = std::move(out.profile);
        if (auto st = stationary_search(game, prof);
            st && st->profile.distance(prof) <= kPolishRadius)
          prof = std::move(st->profile);
        slot.br = admit(std::move(prof), out.sweeps, i, true, slot);
      } else {
        slot.oscillating = out.oscillating;
        slot.message = out.message;
      }
    } catch (const Error& e) {
      slot.failed = true;
      slot.message = e.what();
    }
    if (cfg.stationary_search) {
      if (auto st = stationary_search(game, starts[i]))
        slot.newton = admit(std::move(st->profile), st->iterations, i, false,
                            slot);
    }
  });

  EquilibriumSet set;
  auto& diag = set.diagnostics;
  diag.starts = starts.size();
  std::vector<Candidate> cands;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    Slot& s = slots[i];
    if (s.br_converged) ++diag.br_converged;
    else if (s.failed) ++diag.br_failed;
    else ++diag.br_nonconverged;
    if (s.oscillating) ++diag.br_oscillating;
    if (s.newton) ++diag.stationary_converged;
    diag.rejected += static_cast<std::size_t>(s.rejected);
    if (!s.message.empty() && diag.messages.size() < 10)
      diag.messages.push_back("start " + std::to_string(i) + ": " + s.message);
    if (s.br) cands.push_back(std::move(*s.br));
    if (s.newton) cands.push_back(std::move(*s.newton));
  }
  std::stable_sort(cands.begin(), cands.end(),
                   [](const Candidate& a, const Candidate& b) {
                     if (a.key != b.key) return a.key < b.key;
                     if (lex_less(a.profile, b.profile)) return true;
                     if (lex_less(b.profile, a.profile)) return false;
                     if (a.start != b.start) return a.start < b.start;
                     return a.from_br && !b.from_br;
                   });

  // Greedy clustering against each cluster's first member.
  std::vector<std::vector<std::size_t>> clusters;
  for (std::size_t c = 0; c < cands.size(); ++c) {
    bool placed = false;
    for (auto& members : clusters) {
      if (cands[members.front()].profile.distance(cands[c].profile) <=
          cfg.cluster_radius) {
        members.push_back(c);
        placed = true;
        break;
      }
    }
    if (!placed) clusters.push_back({c});
  }
  auto representative = [&](const std::vector<std::size_t>& members) {
    std::size_t best = members.front();
    for (std::size_t m : members)
      if (cands[m].kkt < cands[best].kkt) best = m;
    return best;
  };
  for (bool merged = true; merged;) {
    merged = false;
    for (std::size_t a = 0; a < clusters.size() && !merged; ++a) {
      for (std::size_t b = a + 1; b < clusters.size() && !merged; ++b) {
        if (cands[representative(clusters[a])].profile.distance(
                cands[representative(clusters[b])].profile) <=
            cfg.cluster_radius) {
          clusters[a].insert(clusters[a].end(), clusters[b].begin(),
                             clusters[b].end());
          std::sort(clusters[a].begin(), clusters[a].end());
          clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(b));
          merged = true;
        }
      }
    }
  }

  for (const auto& members : clusters) {
    const std::size_t rep = representative(members);
    EquilibriumResult r = make_result(game, cands[rep].profile, tol);
    if (!(r.kkt_residual <= tol && r.deviation_gain <= tol) ||
        !check_feasibility(game.network(), game.users(), game.paths(),
                           r.profile)
             .feasible) {
      diag.rejected += members.size();
      continue;
    }
    r.iterations = cands[rep].iterations;
    for (std::size_t m : members)
      (cands[m].from_br ? r.basin_count : r.stationary_hits) += 1;
    double diameter = 0.0;
    if (members.size() <= 1500) {
      for (std::size_t a = 0; a < members.size(); ++a)
        for (std::size_t b = a + 1; b < members.size(); ++b)
          diameter = std::max(diameter, cands[members[a]].profile.distance(
                                            cands[members[b]].profile));
    } else {
      for (std::size_t m : members)
        diameter = std::max(diameter, 2.0 * cands[m].profile.distance(
                                                cands[rep].profile));
    }
    r.diameter = diameter;
    set.equilibria.push_back(std::move(r));
  }
  std::stable_sort(set.equilibria.begin(), set.equilibria.end(),
                   [](const EquilibriumResult& a, const EquilibriumResult& b) {
                     if (a.operating_cost[0] != b.operating_cost[0])
                       return a.operating_cost[0] < b.operating_cost[0];
                     return lex_less(a.profile, b.profile);
                   });
  if (set.equilibria.empty()) {
    std::ostringstream os;
    os << "no verified equilibrium from " << diag.starts << " starts ("
       << diag.br_converged << " converged, " << diag.br_nonconverged
       << " non-converged, " << diag.br_failed << " failed, " << diag.rejected
       << " rejected)";
    for (const auto& m : diag.messages) os << "; " << m;
    throw ConvergenceError(os.str());
  }
  return set;
}

}  // namespace cooproute
