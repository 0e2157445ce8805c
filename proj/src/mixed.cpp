#include "cooproute/mixed.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cooproute/cost_function.hpp"
#include "cooproute/error.hpp"

namespace cooproute {

namespace {

constexpr double kMargin = 1e-9;
constexpr double kSingularBand = 0.05;
constexpr int kGridPoints = 1001;
const double kNaN = std::numeric_limits<double>::quiet_NaN();

double delay(double capacity, double flow) {
  return link_cost(MM1Cost{capacity}, flow);
}

double delay_slope(double capacity, double flow) {
  return link_cost_derivative(MM1Cost{capacity}, flow);
}

double share(double w, double t) { return w == 0.0 ? 0.0 : w * t; }

// Group operating cost with the Wardrop allocation frozen.
double group_cost(const MixedScenario& s, double x, double w2) {
  const double w1 = s.r2 - w2;
  const double t1 = delay(s.c1, x + w1);
  const double t2 = delay(s.c2, s.r1 - x + w2);
  const double group = share(x, t1) + share(s.r1 - x, t2);
  const double crowd = share(w1, t1) + share(w2, t2);
  return share(1.0 - s.alpha, group) + share(s.alpha, crowd);
}

// d/dx of group_cost.
double group_slope(const MixedScenario& s, double x, double w2) {
  const double w1 = s.r2 - w2;
  const double f1 = x + w1;
  const double f2 = s.r1 - x + w2;
  const double b = 1.0 - s.alpha;
  return share(b, delay(s.c1, f1) - delay(s.c2, f2)) +
         share(b * x + s.alpha * w1, delay_slope(s.c1, f1)) -
         share(b * (s.r1 - x) + s.alpha * w2, delay_slope(s.c2, f2));
}

MixedCase classify_case(const MixedScenario& s, double w2) {
  if (w2 <= 0.0) return MixedCase::WardropLink1Only;
  if (w2 >= s.r2) return MixedCase::WardropLink2Only;
  return MixedCase::BothLinks;
}

MixedSubcase classify_subcase(const MixedScenario& s, double x) {
  return (x > kMargin && x < s.r1 - kMargin) ? MixedSubcase::Interior
                                             : MixedSubcase::Boundary;
}

MixedIntermediates base_intermediates(const MixedScenario& s) {
  MixedIntermediates m;
  m.cc = -(s.c2 - s.c1) / 2.0 - (s.r2 - s.r1) / 2.0;
  m.dd = -(s.c2 - s.c1) / 2.0 + (s.r2 + s.r1) / 2.0;
  m.a1 = std::max(m.cc, 0.0);
  m.b1 = std::min(m.dd, s.r1);
  m.c1 = std::min(m.cc, s.r1);
  m.d1 = std::max(m.dd, 0.0);
  const double k = 2.0 * s.alpha - 1.0;
  if (std::abs(k) >= kSingularBand) {
    m.m1 = (-s.alpha * (s.c2 - s.c1) + s.r1 * k) / (2.0 * k);
    m.n1 = ((s.c1 - s.c2) * (1.0 - s.alpha) + k * s.r2) / (2.0 * k);
  } else {
    m.m1 = kNaN;
    m.n1 = kNaN;
  }
  return m;
}

// Link-1-only condition (Wardrop flow on link 2 is zero).
Quadratic link1_quadratic(const MixedScenario& s, CaseVariant v) {
  const double C1 = s.c1, C2 = s.c2, r1 = s.r1, r2 = s.r2, a = s.alpha;
  switch (v) {
    case CaseVariant::Derived: {
      const double A = (1 - a) * (C1 - r2) + a * r2;
      const double B = (1 - a) * C2;
      const double p = C2 - r1;
      const double q = C1 - r2;
      return {A - B, 2 * A * p + 2 * B * q, A * p * p - B * q * q};
    }
    case CaseVariant::Statement:
      return {(C1 - C2 + r2) * (1 - a) - a * r2,
              C1 * (1 - a) * (2 * (C2 - r2 - r1) + 2 * (C2 - r2)) +
                  2 * a * r2 * C1,
              C1 * (1 - a) * ((C2 - r1 - r2) * (C2 - r1 - r2) - C1 * (C2 - r2)) -
                  a * r2 * C1 * C1};
    case CaseVariant::Proof:
      return {(C1 - C2 - r2) * (1 - a) + a * r2,
              2 * (1 - a) * ((C1 - r2) * (2 * (C2 - r2) + r1)) +
                  2 * a * r2 * (C2 - r1),
              (1 - a) * (C1 - r2) *
                      ((C2 - r1) * (C2 - r1) - (C2 - r1) * (C1 - r2) -
                       r1 * (C1 - r2)) +
                  a * r2 * (C2 - r1) * (C2 - r1)};
  }
  return {};
}

// Link-2-only condition (all Wardrop flow on link 2).
Quadratic link2_quadratic(const MixedScenario& s, CaseVariant v) {
  const double C1 = s.c1, C2 = s.c2, r1 = s.r1, r2 = s.r2, a = s.alpha;
  switch (v) {
    case CaseVariant::Derived: {
      const double P = (1 - a) * C1;
      const double A = (1 - a) * (C2 - r2) + a * r2;
      const double K = C2 - r1 - r2;
      return {P - A, 2 * P * K + 2 * A * C1, P * K * K - A * C1 * C1};
    }
    case CaseVariant::Statement:
      return link1_quadratic(s, CaseVariant::Statement);
    case CaseVariant::Proof:
      return {(C1 - C2 + r2) * (1 - a) - a * r2,
              (1 - a) * (4 * C1 * (C2 - r1 - r2) + 2 * r1 * C1) -
                  2 * a * r2 * C1,
              (1 - a) * ((C2 - r1 - r2 + C1) * C1 * (C2 - r2 - r1) -
                         r1 * C1 * C1) +
                  a * r2 * C1 * C1};
  }
  return {};
}

std::vector<double> roots_in(const Quadratic& q, double lo, double hi) {
  std::vector<double> out;
  for (double r : q.roots())
    if (r >= lo && r <= hi) out.push_back(r);
  return out;
}

}  // namespace

void MixedScenario::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw ConfigError(std::string(name) + " must be positive");
  };
  positive(c1, "C1");
  positive(c2, "C2");
  positive(r1, "r1");
  positive(r2, "r2");
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw ConfigError("alpha must lie in [0, 1]");
  if (!(r1 + r2 < c1 + c2)) {
    std::ostringstream os;
    os << "infeasible: r1 + r2 = " << r1 + r2 << " >= C1 + C2 = " << c1 + c2;
    throw InfeasibleError(os.str());
  }
}

std::string to_string(MixedCase c) {
  switch (c) {
    case MixedCase::BothLinks: return "both-links";
    case MixedCase::WardropLink1Only: return "wardrop-link1-only";
    case MixedCase::WardropLink2Only: return "wardrop-link2-only";
  }
  return "?";
}

std::string to_string(MixedSubcase s) {
  return s == MixedSubcase::Interior ? "interior" : "boundary";
}

std::string to_string(CaseVariant v) {
  switch (v) {
    case CaseVariant::Derived: return "derived";
    case CaseVariant::Statement: return "statement";
    case CaseVariant::Proof: return "proof";
  }
  return "?";
}

std::vector<double> Quadratic::roots() const {
  const double scale = std::max({std::abs(a), std::abs(b), std::abs(c)});
  if (scale == 0.0) return {};
  if (std::abs(a) <= 1e-14 * scale) {
    if (b == 0.0) return {};
    return {-c / b};
  }
  const double d = discriminant();
  if (d < 0.0) return {};
  const double sq = std::sqrt(d);
  const double q = -0.5 * (b + std::copysign(sq, b));
  std::vector<double> r;
  if (q == 0.0) {
    r.push_back(0.0);
  } else {
    r.push_back(q / a);
    r.push_back(c / q);
  }
  std::sort(r.begin(), r.end());
  r.erase(std::unique(r.begin(), r.end()), r.end());
  return r;
}

WardropSplit wardrop_split(double c1, double c2, double group1, double group2,
                           double mass) {
  if (!(group1 < c1) || !(group2 < c2) || !(group1 + group2 + mass < c1 + c2)) {
    std::ostringstream os;
    os << "no Wardrop allocation of mass " << mass
       << " stays below capacity (group flows " << group1 << ", " << group2
       << "; capacities " << c1 << ", " << c2 << ")";
    throw InfeasibleError(os.str());
  }
  // gap(w) = T1 - T2 with w the mass on link 2; decreasing in w.
  auto gap = [&](double w) {
    return delay(c1, group1 + mass - w) - delay(c2, group2 + w);
  };
  if (mass == 0.0) return {0.0, 0.0};
  if (gap(0.0) <= 0.0) return {mass, 0.0};
  if (gap(mass) >= 0.0) return {0.0, mass};
  double lo = 0.0;
  double hi = mass;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (gap(mid) > 0.0 ? lo : hi) = mid;
  }
  const double w = std::abs(gap(lo)) <= std::abs(gap(hi)) ? lo : hi;
  return {mass - w, w};
}

double group_best_response(const MixedScenario& s, double wardrop_link2) {
  const double w1 = s.r2 - wardrop_link2;
  const double lo = std::max(0.0, s.r1 + wardrop_link2 - s.c2 + kMargin);
  const double hi = std::min(s.r1, s.c1 - w1 - kMargin);
  if (lo > hi) {
    std::ostringstream os;
    os << "group demand " << s.r1
       << " cannot be placed below capacity against Wardrop flows (" << w1
       << ", " << wardrop_link2 << ")";
    throw InfeasibleError(os.str());
  }
  if (group_slope(s, lo, wardrop_link2) >= 0.0) return lo;
  if (group_slope(s, hi, wardrop_link2) <= 0.0) return hi;
  double a = lo;
  double b = hi;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) break;
    (group_slope(s, mid, wardrop_link2) < 0.0 ? a : b) = mid;
  }
  return 0.5 * (a + b);
}

MixedVerification verify_mixed(const MixedScenario& s, double group_link1,
                               double wardrop_link2, double tol) {
  MixedVerification v;
  const double x = group_link1;
  const double w2 = wardrop_link2;
  const double w1 = s.r2 - w2;
  v.within_bounds = x >= -1e-12 && x <= s.r1 + 1e-12 && w2 >= -1e-12 &&
                    w2 <= s.r2 + 1e-12;
  const double f1 = x + w1;
  const double f2 = s.r1 - x + w2;
  v.below_capacity = f1 < s.c1 - kMargin && f2 < s.c2 - kMargin;
  if (!v.within_bounds || !v.below_capacity) {
    v.wardrop_gap = v.deviation_gain = v.kkt_residual = kInfiniteCost;
    return v;
  }
  const double t1 = delay(s.c1, f1);
  const double t2 = delay(s.c2, f2);
  const double least = std::min(t1, t2);
  if (w1 > 0.0) v.wardrop_gap = std::max(v.wardrop_gap, t1 - least);
  if (w2 > 0.0) v.wardrop_gap = std::max(v.wardrop_gap, t2 - least);

  const double base = group_cost(s, x, w2);
  double best = base;
  for (int k = 0; k < kGridPoints; ++k) {
    const double c = group_cost(s, s.r1 * k / (kGridPoints - 1), w2);
    if (c < best) best = c;
  }
  v.deviation_gain = base - best;

  const double d = group_slope(s, x, w2);
  if (x <= 0.0) v.kkt_residual = std::max(-d, 0.0);
  else if (x >= s.r1) v.kkt_residual = std::max(d, 0.0);
  else v.kkt_residual = std::abs(d);

  v.passed = v.wardrop_gap <= tol && v.deviation_gain <= tol &&
             v.kkt_residual <= tol;
  return v;
}

std::vector<MixedSolution> mixed_closed_form(const MixedScenario& s,
                                             const ClosedFormOptions& opt) {
  s.validate();
  const MixedIntermediates base = base_intermediates(s);
  std::vector<MixedSolution> out;
  auto emit = [&](double x, double w2, MixedCase kind, MixedSubcase sub,
                  CaseVariant variant, std::string note,
                  const MixedIntermediates& inter) {
    MixedSolution m;
    m.group_link1 = x;
    m.wardrop_link2 = w2;
    m.kind = kind;
    m.subcase = sub;
    m.variant = variant;
    m.note = std::move(note);
    m.inter = inter;
    m.check = verify_mixed(s, x, w2, opt.verify_tolerance);
    m.rejected = !m.check.passed;
    out.push_back(std::move(m));
  };

  // Both links carry Wardrop flow: Wardrop flow on link 2 is x - cc.
  if (base.a1 <= base.b1) {
    if (std::isnan(base.m1)) {
      emit(kNaN, kNaN, MixedCase::BothLinks, MixedSubcase::Interior,
           CaseVariant::Derived, "skipped: alpha within 0.05 of 0.5", base);
      out.back().rejected = true;
    } else if (base.a1 < base.m1 && base.m1 < base.b1) {
      emit(base.m1, base.n1, MixedCase::BothLinks, MixedSubcase::Interior,
           CaseVariant::Derived, "M1 inside (a1, b1)", base);
    }
    const double k = 2.0 * s.alpha - 1.0;
    if (-base.cc >= 0.0 && -base.cc <= s.r2) {
      const bool hint =
          s.r1 < std::min(s.r2 + s.c2 - s.c1,
                          (s.alpha * (s.c2 - s.c1) + 2 * s.alpha * s.r2) / k);
      emit(0.0, -base.cc, MixedCase::BothLinks, MixedSubcase::Boundary,
           CaseVariant::Derived,
           hint ? "stated case condition holds" : "stated case condition fails",
           base);
    }
    if (s.r1 - base.cc >= 0.0 && s.r1 - base.cc <= s.r2) {
      const bool hint = s.r1 < std::min(s.alpha * (s.c2 - s.c1) / (-k),
                                        s.r2 - (s.c2 - s.c1));
      emit(s.r1, s.r1 - base.cc, MixedCase::BothLinks, MixedSubcase::Boundary,
           CaseVariant::Derived,
           hint ? "stated case condition holds" : "stated case condition fails",
           base);
    }
  }

  std::vector<CaseVariant> variants{CaseVariant::Derived};
  if (opt.case_audit) {
    variants.push_back(CaseVariant::Statement);
    variants.push_back(CaseVariant::Proof);
  }

  // Wardrop flow only on link 1: needs x <= cc.
  for (CaseVariant v : variants) {
    MixedIntermediates m = base;
    m.h = link1_quadratic(s, v);
    auto interior = [&](double lo, double hi) {
      for (double r : roots_in(m.h, lo, hi)) {
        m.m2 = r;
        emit(r, 0.0, MixedCase::WardropLink1Only,
             r > lo && r < hi ? MixedSubcase::Interior : MixedSubcase::Boundary,
             v, "root of h", m);
      }
    };
    auto boundary = [&](double x, const char* why) {
      emit(x, 0.0, MixedCase::WardropLink1Only, MixedSubcase::Boundary, v, why,
           m);
    };
    switch (v) {
      case CaseVariant::Derived:
        if (base.c1 >= 0.0) {
          interior(0.0, base.c1);
          boundary(0.0, "window end 0");
          boundary(base.c1, "window end c1");
        }
        break;
      case CaseVariant::Statement:
        interior(base.a1, s.r1);
        if (m.h(s.r1) > 0.0) boundary(base.a1, "h(r1) > 0");
        else if (m.h(s.r1) < 0.0) boundary(s.r1, "h(r1) < 0");
        break;
      case CaseVariant::Proof:
        if (base.c1 >= 0.0) {
          interior(0.0, base.c1);
          if (m.h(0.0) > 0.0) boundary(0.0, "h(0) > 0");
          else if (m.h(0.0) < 0.0) boundary(base.c1, "h(0) < 0");
        }
        break;
    }
  }

  // Wardrop flow only on link 2: needs x >= dd.
  for (CaseVariant v : variants) {
    MixedIntermediates m = base;
    m.g = link2_quadratic(s, v);
    auto interior = [&](double lo, double hi) {
      for (double r : roots_in(m.g, lo, hi)) {
        m.m3 = r;
        emit(r, s.r2, MixedCase::WardropLink2Only,
             r > lo && r < hi ? MixedSubcase::Interior : MixedSubcase::Boundary,
             v, "root of g", m);
      }
    };
    auto boundary = [&](double x, const char* why) {
      emit(x, s.r2, MixedCase::WardropLink2Only, MixedSubcase::Boundary, v, why,
           m);
    };
    switch (v) {
      case CaseVariant::Derived:
        if (base.d1 <= s.r1) {
          interior(base.d1, s.r1);
          boundary(base.d1, "window end d1");
          boundary(s.r1, "window end r1");
        }
        break;
      case CaseVariant::Statement: {
        const double d1 = std::min(base.dd, s.r1);
        interior(0.0, d1);
        if (m.g(0.0) > 0.0) boundary(0.0, "h(0) > 0");
        else if (m.g(0.0) < 0.0) boundary(d1, "h(0) < 0");
        break;
      }
      case CaseVariant::Proof:
        if (base.d1 <= s.r1) {
          interior(base.d1, s.r1);
          if (m.g(s.r2) > 0.0) boundary(0.0, "g(r2) > 0");
          else if (m.g(s.r2) < 0.0) boundary(base.d1, "g(r2) < 0");
        }
        break;
    }
  }
  return out;
}

std::vector<MixedSolution> accepted_candidates(
    const std::vector<MixedSolution>& all, double radius) {
  std::vector<MixedSolution> out;
  for (const auto& m : all) {
    if (m.rejected) continue;
    const bool dup = std::any_of(out.begin(), out.end(), [&](const auto& o) {
      return std::abs(o.group_link1 - m.group_link1) <= radius &&
             std::abs(o.wardrop_link2 - m.wardrop_link2) <= radius;
    });
    if (!dup) out.push_back(m);
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.group_link1 < b.group_link1;
  });
  return out;
}

MixedNumericResult mixed_numeric(const MixedScenario& s,
                                 const MixedConfig& cfg) {
  s.validate();
  MixedNumericResult result;
  auto respond = [&](double x) {
    return wardrop_split(s.c1, s.c2, x, s.r1 - x, s.r2).link2;
  };
  std::vector<double> found;

  for (int k = 0; k < cfg.starts; ++k) {
    const double x0 = cfg.starts == 1 ? 0.0 : s.r1 * k / (cfg.starts - 1);
    try {
      double x = x0;
      double w = respond(x);
      double prev_x = kNaN;
      bool done = false;
      for (int it = 0; it < cfg.max_alternations && !done; ++it) {
        const double nx = group_best_response(s, w);
        const double nw = respond(nx);
        const double change = std::max(std::abs(nx - x), std::abs(nw - w));
        if (change < cfg.fixed_point_tolerance) {
          done = true;
        } else if (std::abs(nx - prev_x) < cfg.fixed_point_tolerance) {
          break;  // period-2 cycle
        }
        prev_x = x;
        x = nx;
        w = nw;
      }
      if (done) {
        found.push_back(x);
      } else {
        ++result.nonconverged_starts;
        if (result.messages.size() < 10) {
          std::ostringstream os;
          os << "start x=" << x0 << ": alternation did not settle";
          result.messages.push_back(os.str());
        }
      }
    } catch (const InfeasibleError& e) {
      ++result.nonconverged_starts;
      if (result.messages.size() < 10)
        result.messages.push_back(std::string("start: ") + e.what());
    }
  }

  // Fixed points of psi(x) = best_response(wardrop(x)) - x, including ones
  // the alternation is repelled from.
  auto psi = [&](double x) -> double {
    try {
      return group_best_response(s, respond(x)) - x;
    } catch (const InfeasibleError&) {
      return kNaN;
    }
  };
  const int n = std::max(cfg.scan_points, 2);
  double px = 0.0;
  double pv = psi(0.0);
  if (pv == 0.0) found.push_back(0.0);
  for (int k = 1; k < n; ++k) {
    const double x = s.r1 * k / (n - 1);
    const double v = psi(x);
    if (v == 0.0) found.push_back(x);
    if (std::isfinite(pv) && std::isfinite(v) && pv * v < 0.0) {
      double lo = px;
      double hi = x;
      const bool rising = pv < 0.0;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double m = psi(mid);
        if (!std::isfinite(m)) break;
        ((m < 0.0) == rising ? lo : hi) = mid;
      }
      found.push_back(std::abs(psi(lo)) <= std::abs(psi(hi)) ? lo : hi);
    }
    px = x;
    pv = v;
  }

  std::vector<MixedSolution> sols;
  for (double x : found) {
    MixedSolution m;
    m.group_link1 = x;
    m.wardrop_link2 = respond(x);
    m.check = verify_mixed(s, x, m.wardrop_link2, cfg.verify_tolerance);
    if (!m.check.passed) continue;
    m.kind = classify_case(s, m.wardrop_link2);
    m.subcase = classify_subcase(s, x);
    m.inter = base_intermediates(s);
    m.note = "numeric";
    sols.push_back(std::move(m));
  }
  std::stable_sort(sols.begin(), sols.end(), [](const auto& a, const auto& b) {
    if (a.group_link1 != b.group_link1) return a.group_link1 < b.group_link1;
    return a.wardrop_link2 < b.wardrop_link2;
  });
  for (auto& m : sols) {
    auto near = std::find_if(
        result.solutions.begin(), result.solutions.end(), [&](const auto& o) {
          return std::abs(o.group_link1 - m.group_link1) <= cfg.dedupe_radius &&
                 std::abs(o.wardrop_link2 - m.wardrop_link2) <=
                     cfg.dedupe_radius;
        });
    if (near == result.solutions.end()) {
      result.solutions.push_back(std::move(m));
    } else if (m.check.kkt_residual < near->check.kkt_residual) {
      *near = std::move(m);
    }
  }
  return result;
}

}  // namespace cooproute
