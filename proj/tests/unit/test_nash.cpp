#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "cooproute/error.hpp"
#include "cooproute/nash.hpp"
#include "helpers.hpp"

using namespace cooproute;
using testing::split;

namespace {

struct Point {
  double x1, x2;  // path-0 flow of each user
};

// Frozen from an independent Python oracle (dense-grid best responses with a
// bounded scalar refinement, fixed points of BR1(BR2(x)) - x located by
// Brent's method).
const Point kBraessAsym[] = {
    {2.0, 1.0}, {0.0, 0.0951891387496}, {0.0196064515238, 0.105650504822}};
const double kBraessAsymJ[][2] = {{0.952380952381, 0.322580645161},
                                  {1.24760034159, 0.430141840562},
                                  {1.23643292435, 0.431386822482}};
const Point kBraessSym[] = {
    {2.0, 1.0}, {0.0, 0.0}, {0.950534890607, 0.44869469602}};
const double kBraessSymJ[][2] = {{0.952380952381, 0.322580645161},
                                 {1.20238095238, 0.433691756272},
                                 {0.886455887927, 0.442990754725}};
const Point kParallel07[] = {{0.0, 1.0}, {0.5, 0.5}, {1.0, 0.0}};

std::vector<Point> points(const EquilibriumSet& set) {
  std::vector<Point> out;
  for (const auto& e : set.equilibria)
    out.push_back({e.profile.path_flows(0)[0], e.profile.path_flows(1)[0]});
  return out;
}

bool contains(const std::vector<Point>& got, Point want, double tol) {
  return std::any_of(got.begin(), got.end(), [&](const Point& p) {
    return std::abs(p.x1 - want.x1) <= tol && std::abs(p.x2 - want.x2) <= tol;
  });
}

const EquilibriumResult* find(const EquilibriumSet& set, Point want, double tol) {
  for (const auto& e : set.equilibria)
    if (std::abs(e.profile.path_flows(0)[0] - want.x1) <= tol &&
        std::abs(e.profile.path_flows(1)[0] - want.x2) <= tol)
      return &e;
  return nullptr;
}

// Grid oracle: argmin over 1001 splits of a user's operating cost.
double grid_best_split(const Game& g, const FlowProfile& p, std::size_t user) {
  const double r = g.users()[user].demand;
  double best = kInfiniteCost;
  double arg = 0.0;
  for (int k = 0; k <= 1000; ++k) {
    const double x = r * k / 1000.0;
    auto flows = p.path_flows();
    flows[user] = {x, r - x};
    const double v = g.operating_costs(g.raw_profile(flows))[user];
    if (v < best) {
      best = v;
      arg = x;
    }
  }
  return arg;
}

bool same_sets(const EquilibriumSet& a, const EquilibriumSet& b) {
  if (a.equilibria.size() != b.equilibria.size()) return false;
  for (std::size_t k = 0; k < a.equilibria.size(); ++k) {
    const auto& x = a.equilibria[k];
    const auto& y = b.equilibria[k];
    if (x.profile.path_flows() != y.profile.path_flows() ||
        x.raw_cost != y.raw_cost || x.operating_cost != y.operating_cost ||
        x.basin_count != y.basin_count || x.lambda != y.lambda)
      return false;
  }
  return true;
}

}  // namespace

TEST_SUITE("nash") {
  TEST_CASE("single user on symmetric links splits evenly") {
    for (double alpha : {0.0, 0.6}) {
      const std::vector<double> a = {alpha};
      const Game g(parallel_network(MM1Cost{4.1}, MM1Cost{4.1}),
                   testing::users_to(NodeId{2}, {{1, 1.0}}),
                   CooperationProfile::from_degrees(a));
      const auto br = best_response(g, g.profile({{1.0, 0.0}}), 0, {});
      CHECK(br[0] == doctest::Approx(0.5).epsilon(1e-9));
      CHECK(br[1] == doctest::Approx(0.5).epsilon(1e-9));
    }
  }

  TEST_CASE("selfish user keeps a corner when the other link is slow") {
    const Game g = testing::parallel_mm1(4.1, 1.0, 0.1, 0.0, 0.0, 0.0);
    const FlowProfile p = split(g, 0.05, 0.0);
    const auto br = best_response(g, p, 0, {});
    CHECK(grid_best_split(g, p, 0) == doctest::Approx(0.1));
    CHECK(br[0] == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(br[1] == doctest::Approx(0.0).epsilon(1e-12));
  }

  TEST_CASE("best response agrees with the grid oracle") {
    const Game alt(parallel_network(LinearCost{1, 0}, LinearCost{1, 0}),
                   testing::users_to(NodeId{2}, {{1, 1.0}, {1, 1.0}}),
                   CooperationProfile::from_degrees(std::vector<double>{1.0, 0.0}));
    const FlowProfile p = split(alt, 0.5, 0.7);
    // Fully altruistic: user 1 minimizes J^2 = 0.7 (x + 0.7) + 0.3 (1.3 - x).
    CHECK(grid_best_split(alt, p, 0) == 0.0);
    CHECK(best_response(alt, p, 0, {})[0] == doctest::Approx(0.0));

    const Game lb = testing::load_balancing_mm1(4.1, 10, 2.0, 1.0, 0.93, 0.0);
    for (double x2 : {0.0, 0.3, 0.8}) {
      const FlowProfile q = split(lb, 1.0, x2);
      for (std::size_t u = 0; u < 2; ++u) {
        const double grid = grid_best_split(lb, q, u);
        const double step = lb.users()[u].demand / 1000.0;
        CHECK(std::abs(best_response(lb, q, u, {})[0] - grid) <= step);
      }
    }
  }

  TEST_CASE("best response dynamics") {
    const Game g = testing::load_balancing_mm1(4.1, 10, 2.0, 1.0, 0.93, 0.0);
    SolverConfig cfg;
    const auto fixed = br_dynamics(g, split(g, 2.0, 1.0), cfg);
    CHECK(fixed.converged);
    CHECK(fixed.sweeps == 1);
    CHECK(fixed.profile.path_flows(0)[0] == 2.0);
    CHECK(fixed.profile.path_flows(1)[0] == 1.0);

    // User 2 starting on its detour leads to the second equilibrium.
    const auto moved = br_dynamics(g, split(g, 2.0, 0.0), cfg);
    CHECK(moved.converged);
    CHECK(moved.profile.link_flow(0) ==
          doctest::Approx(1.0 - 0.0951891387496).epsilon(1e-8));
    CHECK(moved.profile.path_flows(1)[0] ==
          doctest::Approx(0.0951891387496).epsilon(1e-7));

    cfg.max_sweeps = 1;
    const auto cut = br_dynamics(g, split(g, 1.0, 0.5), cfg);
    CHECK_FALSE(cut.converged);
    CHECK_FALSE(cut.message.empty());
  }

  TEST_CASE("verification") {
    const Game g = testing::parallel_mm1(4.1, 4.1, 1.0, 1.0, 0.0, 0.0);
    const auto ok = verify_nash(g, split(g, 0.5, 0.5), 1e-6);
    CHECK(ok.passed);
    CHECK(ok.max_kkt_residual < 1e-10);

    const auto bad = verify_nash(g, split(g, 0.55, 0.5), 1e-6);
    CHECK_FALSE(bad.passed);
    CHECK(bad.max_kkt_residual > 0.0);
    CHECK(bad.deviation_gain[0] > 0.0);

    const Game lb = testing::load_balancing_mm1(4.1, 10, 2.0, 1.0, 0.93, 0.0);
    for (const Point& p : {kBraessAsym[0], kBraessAsym[1]})
      CHECK(verify_nash(lb, split(lb, p.x1, p.x2), 1e-6).passed);
  }

  TEST_CASE("Braess preset equilibria match the oracle") {
    const Game g = testing::load_balancing_mm1(4.1, 10, 2.0, 1.0, 0.93, 0.0);
    const EquilibriumSet set = multistart_nash(g, {});
    const auto got = points(set);
    CHECK(set.equilibria.size() == 3);
    for (int k = 0; k < 3; ++k) {
      const auto* e = find(set, kBraessAsym[k], 1e-6);
      REQUIRE(e != nullptr);
      CHECK(e->raw_cost[0] == doctest::Approx(kBraessAsymJ[k][0]).epsilon(1e-7));
      CHECK(e->raw_cost[1] == doctest::Approx(kBraessAsymJ[k][1]).epsilon(1e-7));
    }
    // Best-response dynamics reaches exactly two of them.
    const auto reached = std::count_if(
        set.equilibria.begin(), set.equilibria.end(),
        [](const EquilibriumResult& e) { return e.basin_count > 0; });
    CHECK(reached == 2);
    CHECK(find(set, kBraessAsym[2], 1e-6)->basin_count == 0);

    const Game sym = testing::load_balancing_mm1(4.1, 10, 2.0, 1.0, 0.9, 0.9);
    const EquilibriumSet s2 = multistart_nash(sym, {});
    CHECK(s2.equilibria.size() == 3);
    for (int k = 0; k < 3; ++k) {
      const auto* e = find(s2, kBraessSym[k], 1e-6);
      REQUIRE(e != nullptr);
      CHECK(e->raw_cost[0] == doctest::Approx(kBraessSymJ[k][0]).epsilon(1e-7));
      CHECK(e->raw_cost[1] == doctest::Approx(kBraessSymJ[k][1]).epsilon(1e-7));
    }
  }

  TEST_CASE("parallel links against the oracle") {
    const Game low = testing::parallel_mm1(4.1, 4.1, 1.0, 1.0, 0.3, 0.3);
    const auto unique = multistart_nash(low, {});
    REQUIRE(unique.equilibria.size() == 1);
    CHECK(contains(points(unique), {0.5, 0.5}, 1e-6));

    const Game high = testing::parallel_mm1(4.1, 4.1, 1.0, 1.0, 0.7, 0.7);
    const auto three = multistart_nash(high, {});
    CHECK(three.equilibria.size() == 3);
    for (const Point& p : kParallel07) CHECK(contains(points(three), p, 1e-6));

    const Game selfish = testing::parallel_mm1(4.1, 4.1, 1.0, 1.0, 0.0, 0.0);
    CHECK(multistart_nash(selfish, {}).equilibria.size() == 1);
  }

  TEST_CASE("every returned equilibrium passes verification") {
    const Game games[] = {
        testing::load_balancing_mm1(4.1, 10, 2.0, 1.0, 0.93, 0.0),
        testing::load_balancing_mm1(4.1, 3, 2.0, 1.0, 0.9, 0.9),
        testing::parallel_mm1(4.1, 3.0, 1.0, 1.5, 0.8, 0.2)};
    for (const Game& g : games) {
      const auto set = multistart_nash(g, {});
      CHECK_FALSE(set.equilibria.empty());
      for (const auto& e : set.equilibria) {
        const auto v = verify_nash(g, e.profile, 1e-6);
        CHECK(v.passed);
        CHECK(e.kkt_residual <= 1e-6);
        CHECK(e.deviation_gain <= 1e-6);
        for (std::size_t l = 0; l < g.num_links(); ++l)
          CHECK(e.profile.link_flow(l) <
                flow_ceiling(g.network().link(l).cost) - 1e-9);
      }
    }
  }

  TEST_CASE("multiple equilibria differ in support") {
    const Game g = testing::load_balancing_mm1(4.1, 10, 2.0, 1.0, 0.93, 0.0);
    const auto set = multistart_nash(g, {});
    REQUIRE(set.equilibria.size() >= 2);
    auto support = [](const FlowProfile& p) {
      std::vector<bool> s;
      bool zero = false;
      for (std::size_t u = 0; u < p.num_users(); ++u)
        for (double f : p.user_link_flows(u)) {
          s.push_back(f > 1e-12);
          zero = zero || f <= 1e-12;
        }
      return std::make_pair(s, zero);
    };
    bool differ = false;
    bool some_zero = false;
    for (std::size_t a = 0; a < set.equilibria.size(); ++a) {
      const auto sa = support(set.equilibria[a].profile);
      some_zero = some_zero || sa.second;
      for (std::size_t b = a + 1; b < set.equilibria.size(); ++b)
        differ = differ || sa.first != support(set.equilibria[b].profile).first;
    }
    CHECK((differ || some_zero));
  }

  TEST_CASE("multistart is deterministic") {
    const Game g = testing::load_balancing_mm1(4.1, 10, 2.0, 1.0, 0.9, 0.9);
    SolverConfig one;
    one.threads = 1;
    SolverConfig many;
    many.threads = 3;
    const auto a = multistart_nash(g, one);
    const auto b = multistart_nash(g, one);
    const auto c = multistart_nash(g, many);
    CHECK(same_sets(a, b));
    CHECK(same_sets(a, c));
  }

  TEST_CASE("relabelling users relabels the equilibria") {
    const Game g = testing::parallel_mm1(4.1, 3.0, 1.0, 1.5, 0.8, 0.2);
    const std::size_t perm[] = {1, 0};
    const Game h = g.permuted(perm);
    const auto a = multistart_nash(g, {});
    const auto b = multistart_nash(h, {});
    REQUIRE(a.equilibria.size() == b.equilibria.size());
    for (const auto& e : a.equilibria) {
      const Point swapped{e.profile.path_flows(1)[0], e.profile.path_flows(0)[0]};
      const auto* m = find(b, swapped, 1e-7);
      REQUIRE(m != nullptr);
      CHECK(m->raw_cost[0] == doctest::Approx(e.raw_cost[1]));
      CHECK(m->raw_cost[1] == doctest::Approx(e.raw_cost[0]));
    }
  }

  TEST_CASE("start grid covers the corners") {
    const Game g = testing::parallel_mm1(4.1, 4.1, 1.0, 1.0, 0.0, 0.0);
    SolverConfig cfg;
    const auto starts = start_grid(g, cfg);
    CHECK(starts.size() == 21 * 21);
    auto has = [&](double x1, double x2) {
      return std::any_of(starts.begin(), starts.end(), [&](const FlowProfile& p) {
        return p.path_flows(0)[0] == x1 && p.path_flows(1)[0] == x2;
      });
    };
    CHECK(has(0, 0));
    CHECK(has(1, 0));
    CHECK(has(0, 1));
    CHECK(has(1, 1));
    cfg.max_starts = 50;
    CHECK(start_grid(g, cfg).size() <= 50);
  }

  TEST_CASE("infeasible demand is reported") {
    const Game g = testing::parallel_mm1(0.001, 0.001, 1.0, 1.0, 0.0, 0.0);
    CHECK_THROWS_AS(multistart_nash(g, {}), InfeasibleError);
  }

  TEST_CASE("solver config validation") {
    SolverConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.grid_density = 1;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = {};
    cfg.cluster_radius = -1;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
  }
}
