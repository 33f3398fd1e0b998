#include "nmating/params.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "nmating/boettcher.hpp"

namespace nmating {

namespace {

constexpr double kBoundaryGap = 1e-4; // continuation stops at r = 1 - gap

cplx family_center_param(Family fam) {
  if (fam == Family::Cubic) return cplx(0, 0);
  if (fam == Family::Newton) return cplx(-0.5, 0);
  throw std::logic_error("family has no parameter plane here");
}

cplx fixed_basin_center(const Map &f) {
  return f.family() == Family::Cubic ? cplx(0, 0) : f.newton_roots()[0];
}

cplx free_critical_point(const Map &f) {
  return f.family() == Family::Cubic ? -f.param() : cplx(0, 0);
}

// linear Boettcher coefficient at the fixed superattracting center:
// phi(z) = B1 (z - c) + O((z - c)^2) with B1 = f''(c)/2
cplx center_linear_coeff(const Map &f) {
  if (f.family() == Family::Cubic) return 1.5 * f.param();
  cplx p1 = f.newton_roots()[0];
  // Newton map of P: N''(r) = P''(r)/P'(r) at a simple root r
  cplx dP = 3.0 * p1 * p1 + f.phat();
  return 3.0 * p1 / dP;
}

// validity radius of the local coordinate, matching the series build
double center_series_radius(const Map &f) {
  cplx c = fixed_basin_center(f);
  double d = 1e9;
  for (cplx cp : f.critical_points())
    if (std::abs(cp - c) > 1e-12) d = std::min(d, std::abs(cp - c));
  if (f.family() == Family::Newton)
    for (cplx p : f.poles()) d = std::min(d, std::abs(p - c));
  return std::min(0.35 * d, 0.25);
}

struct PhiContext {
  Map f;
  RayEngine eng;
  int basin;
  cplx center;
  double rad; // evaluate the series within 0.4 * rad of the center
  cplx lin;

  explicit PhiContext(const Map &m)
      : f(m), eng(m), basin(-1), center(fixed_basin_center(m)),
        rad(center_series_radius(m)), lin(center_linear_coeff(m)) {
    basin = eng.basin_index(center);
  }
};

struct DeepValue {
  cplx w; // local coordinate of the n-th forward image of the critical value
  int n;
};

// iterate the free critical value into the series disk
DeepValue orbit_to_disk(PhiContext &ctx, int cap = 600) {
  cplx v = ctx.f(free_critical_point(ctx.f));
  for (int n = 0; n < cap; ++n) {
    if (std::abs(v - ctx.center) <= 0.4 * ctx.rad)
      return {ctx.eng.bottcher_center(ctx.basin, v), n};
    v = ctx.f(v);
    if (std::abs(v) > 1e12) break;
  }
  throw std::domain_error(
      "critical orbit does not reach the superattracting basin");
}

// w^(1/2^n) on the branch closest to the predictor
cplx root_with_predictor(cplx w, int n, cplx predictor) {
  if (n == 0) return w;
  double scale = std::exp2(-double(n));
  double r = std::pow(std::abs(w), scale);
  double base = std::arg(w);
  double want = std::arg(predictor);
  double m = std::round((want / scale - base) / (2.0 * M_PI));
  return std::polar(r, (base + 2.0 * M_PI * m) * scale);
}

// 2^n t mod 1 for a real angle; ldexp and fmod are exact on doubles, so
// the only error is 2^n times the representation error of t itself
double deep_argument_real(double t, int n) {
  double d = std::fmod(std::ldexp(t, n), 1.0);
  if (d < 0) d += 1.0;
  return 2.0 * M_PI * d;
}

struct Trail {
  std::vector<cplx> points; // accepted continuation parameters, r increasing
  double err = 0;
};

Trail continue_path(Family fam, double tt,
                    const std::function<double(int)> &arg_fn, double r_end,
                    const std::string &label);

struct SegmentResult {
  bool ok;
  cplx value; // on failure, the last branch-tracked value along the segment
};

// continuation of Phi from the family center along the parameter segment;
// the step criterion keeps consecutive values within a quarter of the
// branch gap 2 pi / 2^n, so every root branch is forced
SegmentResult phi_segment(const Map &f) {
  cplx target = f.param();
  cplx base = family_center_param(f.family());
  cplx delta = target - base;
  if (std::abs(delta) < 1e-12) return {true, cplx(0, 0)};
  // start where the quartic local law predicts |Phi| ~ 0.02
  double lead = f.family() == Family::Cubic ? 0.75 : 3.0;
  double tau = std::min(0.9, std::pow(0.02 / lead, 0.25) / std::abs(delta));
  auto eval = [&](double s, cplx pred, int &n_out) {
    Map m = f.family() == Family::Cubic ? Map::cubic(base + s * delta)
                                        : Map::newton(base + s * delta);
    PhiContext ctx(m);
    DeepValue d = orbit_to_disk(ctx);
    n_out = d.n;
    return root_with_predictor(d.w, d.n, pred);
  };
  int n = 0;
  cplx cur = eval(tau, cplx(1, 0), n);
  // the start must be branch-free: no predictor exists yet
  for (int guard = 0; guard < 60 && n > 0; ++guard)
    cur = eval(tau *= 0.7, cplx(1, 0), n);
  if (n > 0) throw std::runtime_error("no branch-free start for Phi");
  double step = tau * 0.5;
  int guard = 0;
  while (tau < 1.0) {
    if (++guard > 200000)
      throw std::runtime_error("Phi continuation stalled before the target");
    double next = std::min(1.0, tau + step);
    int n2 = 0;
    cplx val;
    try {
      val = eval(next, cur, n2);
    } catch (const std::domain_error &) {
      step *= 0.5; // stepped outside the component; approach slower
      if (step < 1e-11) return {false, cur};
      continue;
    }
    double gap = 2.0 * M_PI * std::exp2(-double(n2)) *
                 std::max({std::abs(val), std::abs(cur), 1e-6});
    if (std::abs(val - cur) > 0.25 * gap) {
      step *= 0.5;
      if (step < 1e-11) return {false, cur};
      continue;
    }
    double moved = std::abs(val - cur);
    tau = next;
    cur = val;
    if (moved < 0.02 * gap) step = std::min(step * 1.6, 0.05);
  }
  return {true, cur};
}

// forward Phi without a caller-supplied branch. The straight segment from
// the family center usually suffices; near cusps the component boundary is
// concave and the segment dips outside, so the fallback recovers the
// internal angle by matching an equipotential continuation (the same
// machinery the inverse uses) against the target parameter.
cplx phi_continued(const Map &f) {
  SegmentResult seg = phi_segment(f);
  if (seg.ok) return seg.value;
  PhiContext ctx(f);
  DeepValue d = orbit_to_disk(ctx);
  double r = std::pow(std::abs(d.w), std::exp2(-double(d.n)));
  if (!(r > 0.0) || r >= 1.0)
    throw std::domain_error("parameter sits outside the component");
  cplx target = f.param();
  auto endpoint = [&](double td) {
    td -= std::floor(td);
    Trail tr = continue_path(
        f.family(), td, [td](int n) { return deep_argument_real(td, n); }, r,
        "equipotential angle solve");
    return tr.points.back();
  };
  // the last branch-tracked segment value puts the angle in the right
  // neighborhood; Gauss-Newton along the equipotential does the rest
  double t = std::arg(seg.value) / (2.0 * M_PI);
  t -= std::floor(t);
  double tol = 1e-9 * (1.0 + std::abs(target));
  cplx g = endpoint(t) - target;
  // Gauss-Newton with a backtracking line search: near a cusp the
  // parametrization speed of the equipotential varies sharply, so raw
  // steps overshoot and oscillate
  for (int it = 0; it < 40 && std::abs(g) >= tol; ++it) {
    double h = 1e-6;
    cplx gp = (endpoint(t + h) - endpoint(t - h)) / (2.0 * h);
    if (std::abs(gp) < 1e-300) break;
    double dt = -(std::conj(gp) * g).real() / std::norm(gp);
    dt = std::clamp(dt, -0.02, 0.02);
    bool accepted = false;
    for (int ls = 0; ls < 10 && !accepted; ++ls) {
      double tn = t + dt;
      tn -= std::floor(tn);
      cplx gn = endpoint(tn) - target;
      if (std::abs(gn) < std::abs(g)) {
        t = tn;
        g = gn;
        accepted = true;
      } else {
        dt *= 0.5;
      }
    }
    if (!accepted) break; // no descent left along the curve
  }
  if (std::abs(g) < tol) return std::polar(r, 2.0 * M_PI * t);
  throw std::runtime_error("equipotential angle solve did not converge");
}

Map make_map(Family fam, cplx p) {
  return fam == Family::Cubic ? Map::cubic(p) : Map::newton(p);
}

// smallest n with r^(2^n) inside the window the series evaluates well
int pick_depth(double r, const PhiContext &ctx) {
  double cap = std::min(0.3, 0.7 * std::abs(ctx.lin) * 0.4 * ctx.rad);
  int n = 0;
  double w = r;
  while (w > cap && n < 40) {
    w *= w;
    ++n;
  }
  return n;
}

// 2^n t mod 1 as a double argument, exact in the rational angle
double deep_argument(const Angle &t, int n) {
  Angle d = t;
  for (int i = 0; i < n; ++i) d = d.times(2);
  return 2.0 * M_PI * d.to_double();
}

// Newton's method in the parameter on phi(f^n(critical value)) = w_target
std::optional<cplx> solve_deep(Family fam, cplx w_target, int n, cplx seed) {
  auto H = [&](cplx p) -> cplx {
    Map m = make_map(fam, p);
    PhiContext ctx(m);
    cplx v = m(free_critical_point(m));
    for (int i = 0; i < n; ++i) v = m(v);
    if (std::abs(v - ctx.center) > 0.75 * ctx.rad)
      throw std::domain_error("deep orbit point left the series disk");
    return ctx.eng.bottcher_center(ctx.basin, v) - w_target;
  };
  cplx p = seed;
  for (int it = 0; it < 40; ++it) {
    cplx val, der;
    try {
      val = H(p);
      double h = 1e-7 * (1.0 + std::abs(p));
      der = (H(p + h) - H(p - h)) / (2.0 * h);
    } catch (const std::exception &) {
      return std::nullopt;
    }
    if (std::abs(der) < 1e-300) return std::nullopt;
    cplx stepv = val / der;
    p -= stepv;
    if (std::abs(stepv) < 1e-13 * (1.0 + std::abs(p))) {
      try {
        if (std::abs(H(p)) < 1e-10) return p;
      } catch (const std::exception &) {
        return std::nullopt;
      }
      return std::nullopt;
    }
  }
  return std::nullopt;
}

// first continuation point at small radius r0, on the canonical branch
cplx seed_param(Family fam, double tt, double r0) {
  if (fam == Family::Cubic) {
    // fourth root of 4s/3 in the quadrant sector arg in (-pi/2, 0)
    double mod = std::pow(4.0 * r0 / 3.0, 0.25);
    return std::polar(mod, M_PI * (tt - 1.0) / 2.0);
  }
  // Newton: of the two fourth-root candidates of s/3 pointing into the
  // upper half plane, the component around -1/2 occupies the quarter
  // eps in {Re > 0, Im > 0}: continuations started there reproduce the
  // copy centers (e.g. the t = 2/3 copy around 0.3333i), the other
  // quarter drifts to an unrelated locus near -1.31 + 0.58i
  double mod = std::pow(r0 / 3.0, 0.25);
  cplx eps = std::polar(mod, M_PI * tt / 2.0);
  return cplx(-0.5, 0) + eps;
}

Trail continue_path(Family fam, double tt,
                    const std::function<double(int)> &arg_fn, double r_end,
                    const std::string &label) {
  const double r0 = 0.05;
  Trail tr;
  {
    cplx rough = seed_param(fam, tt, r0);
    PhiContext ctx(make_map(fam, rough));
    int n = pick_depth(r0, ctx);
    cplx w = std::polar(std::pow(r0, std::exp2(double(n))), arg_fn(n));
    auto p = solve_deep(fam, w, n, rough);
    if (!p) throw std::runtime_error("seed refinement failed at " + label);
    tr.points.push_back(*p);
  }
  double r = r0;
  double shrink = 0.82;
  while (r < r_end - 1e-12) {
    double next = std::max(1.0 - (1.0 - r) * shrink, r + 1e-12);
    if (next > r_end) next = r_end;
    cplx pred = tr.points.back();
    if (tr.points.size() >= 2) {
      cplx a = tr.points[tr.points.size() - 2], b = tr.points.back();
      pred = b + (b - a); // steps in r are near-geometric, slope carries over
    }
    PhiContext ctx(make_map(fam, tr.points.back()));
    int n = pick_depth(next, ctx);
    cplx w = std::polar(std::pow(next, std::exp2(double(n))), arg_fn(n));
    auto p = solve_deep(fam, w, n, pred);
    if (!p) {
      // step refused; bisect the gap toward the current radius
      shrink = 0.5 + 0.5 * shrink;
      if (shrink > 1.0 - 1e-9) {
        std::ostringstream os;
        os << "boundary continuation collapsed at " << label << ", r = " << r
           << ", last good parameter " << tr.points.back().real()
           << (tr.points.back().imag() < 0 ? " - " : " + ")
           << std::abs(tr.points.back().imag()) << "i";
        throw std::runtime_error(os.str());
      }
      continue;
    }
    tr.points.push_back(*p);
    r = next;
    shrink = std::max(0.82, shrink * 0.98);
  }
  size_t np = tr.points.size();
  tr.err = np >= 2 ? std::abs(tr.points[np - 1] - tr.points[np - 2]) : 1.0;
  return tr;
}

Trail continue_to_boundary(Family fam, const Angle &t) {
  if (fam != Family::Cubic && fam != Family::Newton)
    throw std::logic_error("family has no parameter plane here");
  if (t.is_zero())
    throw std::domain_error(
        "t = 0 is the slit endpoint; its two one-sided limits differ");
  return continue_path(
      fam, t.to_double(), [&t](int n) { return deep_argument(t, n); },
      1.0 - kBoundaryGap, "angle " + t.str());
}

ParamPoint tag_boundary(Family fam, const Angle &t, const Trail &tr) {
  ParamPoint out;
  out.family = fam;
  out.value = tr.points.back();
  out.t = t;
  out.err = tr.err;
  auto k = doubling_period(t.half());
  if (k && *k >= 2) {
    out.region = Region::CopyCusp;
    out.k = *k;
  } else {
    out.region = Region::Boundary;
  }
  return out;
}

// real quadratic centers z^2 + c of periods 1..4, used as affine seeds
// through the straightening anchors cusp <-> 1/4, main center <-> 0
double quadratic_center(long m) {
  switch (m) {
    case 1: return 0.0;
    case 2: return -1.0;
    case 3: return -1.7548776662466927;
    case 4: return -1.9407998065294847;
    default: throw std::domain_error("center seeds cover m = 1..4");
  }
}

long total_period(const Angle &t, long m) {
  auto k = doubling_period(t.half());
  if (!k || *k < 2)
    throw std::domain_error("t/2 is not periodic under doubling: " + t.str());
  if (m < 1) throw std::domain_error("renormalized period m must be >= 1");
  return *k * m;
}

cplx iterate_crit(const Map &f, long steps) {
  cplx z = free_critical_point(f);
  for (long i = 0; i < steps; ++i) z = f(z);
  return z;
}

std::optional<cplx> solve_periodic(Family fam, long period, cplx seed) {
  auto g = [&](cplx p) {
    Map m = make_map(fam, p);
    return iterate_crit(m, period) - free_critical_point(m);
  };
  cplx p = seed;
  for (int it = 0; it < 60; ++it) {
    cplx val = g(p);
    double h = 1e-7 * (1.0 + std::abs(p));
    cplx der = (g(p + h) - g(p - h)) / (2.0 * h);
    if (!std::isfinite(std::abs(val)) || std::abs(der) < 1e-300)
      return std::nullopt;
    cplx stepv = val / der;
    p -= stepv;
    if (std::abs(stepv) < 1e-14 * (1.0 + std::abs(p))) break;
  }
  if (std::abs(g(p)) > 1e-12) return std::nullopt;
  return p;
}

bool validate_center(Family fam, cplx p, long period, cplx cusp) {
  Map m = make_map(fam, p);
  cplx crit = free_critical_point(m);
  // exact period: no proper divisor closes the orbit
  for (long d = 1; d < period; ++d)
    if (period % d == 0 && std::abs(iterate_crit(m, d) - crit) < 1e-6)
      return false;
  // the free cycle must be disjoint from the fixed superattracting basin
  if (classify_basin(m, SpherePoint::from_plane(crit)) != -2) return false;
  // stay within the copy's neighborhood of its cusp
  if (std::abs(p - cusp) > 0.9 * (1.0 + std::abs(cusp))) return false;
  return true;
}

cplx canonical_cubic(cplx a) {
  cplx cand[4] = {a, -a, std::conj(a), -std::conj(a)};
  for (cplx c : cand)
    if (c.real() >= -1e-9 && c.imag() <= 1e-9) return c;
  return a;
}

// multiplier of the attracting cycle of the free critical orbit; the cycle
// is located by convergence and sharpened by Newton on f^P(z) = z
std::optional<cplx> free_cycle_multiplier(const Map &f, long period) {
  cplx z = free_critical_point(f);
  for (int i = 0; i < 3000; ++i) z = f(z);
  cplx y = z;
  for (int it = 0; it < 60; ++it) {
    cplx val = y, der = cplx(1, 0);
    for (long i = 0; i < period; ++i) {
      der *= f.derivative(val);
      val = f(val);
    }
    cplx num = val - y, den = der - cplx(1, 0);
    if (std::abs(den) < 1e-300) return std::nullopt;
    cplx stepv = num / den;
    y -= stepv;
    if (std::abs(stepv) < 1e-13 * (1.0 + std::abs(y))) break;
  }
  cplx val = y, mult = cplx(1, 0);
  for (long i = 0; i < period; ++i) {
    mult *= f.derivative(val);
    val = f(val);
  }
  if (std::abs(val - y) > 1e-8) return std::nullopt;
  return mult;
}

// period of the attracting free cycle, detected from the settled orbit
std::optional<long> attracting_period(const Map &f, long cap) {
  cplx z = free_critical_point(f);
  for (int i = 0; i < 3000; ++i) {
    z = f(z);
    if (!std::isfinite(std::abs(z)) || std::abs(z) > 1e9) return std::nullopt;
  }
  cplx y = z;
  for (long p = 1; p <= cap; ++p) {
    y = f(y);
    if (std::abs(y - z) < 1e-7) return p;
  }
  return std::nullopt;
}

} // namespace

std::vector<CuspAngle> cusp_angles(long max_den) {
  std::vector<CuspAngle> out;
  for (long q = 3; q <= max_den; q += 2) {
    long k = 1, pow2 = 2 % q;
    while (pow2 != 1) {
      pow2 = (2 * pow2) % q;
      ++k;
    }
    for (long j = 1; 2 * j < q; ++j)
      if (std::gcd(j, q) == 1) out.push_back({Angle(2 * j, q), k});
  }
  std::sort(out.begin(), out.end(),
            [](const CuspAngle &a, const CuspAngle &b) { return a.t < b.t; });
  return out;
}

cplx critical_value_position(const Map &f,
                             std::optional<cplx> predictor) {
  if (f.family() != Family::Cubic && f.family() != Family::Newton)
    throw std::logic_error("family has no parameter plane here");
  {
    Map m = f;
    cplx v = m(free_critical_point(m));
    if (std::abs(v - fixed_basin_center(m)) < 1e-13) return cplx(0, 0);
  }
  PhiContext ctx(f);
  DeepValue d = orbit_to_disk(ctx);
  if (d.n == 0) return d.w;
  if (predictor) return root_with_predictor(d.w, d.n, *predictor);
  return phi_continued(f);
}

cplx critical_value_position(const ParamPoint &p) {
  return critical_value_position(make_map(p.family, p.value));
}

ParamPoint boundary_param(Family family, const Angle &t) {
  Trail tr = continue_to_boundary(family, t);
  return tag_boundary(family, t, tr);
}

ParamPoint boundary_param_exact(Family family, const Angle &t) {
  if (t.numerator() != 1 || t.denominator() != 2)
    throw std::domain_error("exact boundary solve covers t = 1/2 only");
  ParamPoint out = boundary_param(family, t);
  if (family == Family::Cubic) {
    // f_a^2(-a) = a^7 (a^2+3)/8 is a nonzero fixed point, v^2 + (3/2)av = 1:
    // g(a) = a^14 (a^2+3)^2 + 12 a^8 (a^2+3) - 64 = 0
    cplx a = out.value;
    double step = 1;
    for (int i = 0; i < 60 && step > 1e-16; ++i) {
      cplx s = a * a + 3.0;
      cplx a7 = std::pow(a, 7), a8 = a7 * a, a9 = a8 * a;
      cplx a13 = a9 * a * a * a * a, a14 = a13 * a, a15 = a14 * a;
      cplx g = a14 * s * s + 12.0 * a8 * s - 64.0;
      cplx gp = 14.0 * a13 * s * s + 4.0 * a15 * s + 96.0 * a7 * s + 24.0 * a9;
      cplx d = g / gp;
      a -= d;
      step = std::abs(d);
    }
    cplx s = a * a + 3.0;
    cplx v = std::pow(a, 7) * s / 8.0;
    if (std::abs(v * v + 1.5 * a * v - 1.0) > 1e-12)
      throw std::runtime_error("exact boundary solve did not converge");
    out.value = a;
    out.err = step;
  } else {
    // N(0) = (u - 1/4)/(u + 3/4) is a pole, u = lambda^2:
    // c(u) = u^3 - (3/4)u^2 + (51/16)u + 15/64 = 0
    cplx u = out.value * out.value;
    double step = 1;
    for (int i = 0; i < 60 && step > 1e-16; ++i) {
      cplx c = u * u * u - 0.75 * u * u + (51.0 / 16.0) * u + 15.0 / 64.0;
      cplx cp = 3.0 * u * u - 1.5 * u + 51.0 / 16.0;
      cplx d = c / cp;
      u -= d;
      step = std::abs(d);
    }
    cplx n0 = (u - 0.25) / (u + 0.75);
    if (std::abs(3.0 * n0 * n0 - (u + 0.75)) > 1e-12)
      throw std::runtime_error("exact boundary solve did not converge");
    cplx l = std::sqrt(u);
    if (std::abs(l - out.value) > std::abs(l + out.value)) l = -l;
    out.value = l;
    out.err = step;
  }
  return out;
}

ParamPoint center_in_copy(Family family, const Angle &t, long m) {
  long period = total_period(t, m);
  Trail tr = continue_to_boundary(family, t);
  cplx cusp = tr.points.back();
  std::vector<cplx> seeds;
  if (m == 1) {
    cplx d = tr.points.back() - tr.points[tr.points.size() - 2];
    cplx dir = d / std::abs(d);
    double scale = 1.0 + std::abs(cusp);
    for (double push : {0.1, 0.05, 0.02, 0.01, 0.005, 0.002})
      seeds.push_back(cusp + push * scale * dir);
  } else {
    ParamPoint main = center_in_copy(family, t, 1);
    double rho = 1.0 - 4.0 * quadratic_center(m);
    for (double w : {1.0, 0.9, 1.1, 0.8, 1.2})
      seeds.push_back(cusp + w * rho * (main.value - cusp));
  }
  for (cplx seed : seeds) {
    auto sol = solve_periodic(family, period, seed);
    if (!sol) continue;
    if (!validate_center(family, *sol, period, cusp)) continue;
    Map mp = make_map(family, *sol);
    ParamPoint out;
    out.family = family;
    out.value = *sol;
    out.region = Region::CopyCenter;
    out.t = t;
    out.k = period / m;
    out.m = m;
    out.err = std::abs(iterate_crit(mp, period) - free_critical_point(mp));
    return out;
  }
  throw std::runtime_error("no validated center for t = " + t.str() +
                           ", m = " + std::to_string(m));
}

ParamPoint correspondence(const ParamPoint &p) {
  if (p.family != Family::Cubic)
    throw std::domain_error(
        "unsupported parameter: the correspondence maps cubic parameters");
  cplx a = canonical_cubic(p.value);
  if (std::abs(a - cplx(0, -4.0 / 3.0)) < 0.05)
    throw std::domain_error("unsupported parameter: excluded copy (the fixed "
                            "external rays 0 and 1/2 land together)");
  if (std::abs(a - cplx(0, -std::sqrt(2.0))) < 0.05)
    throw std::domain_error(
        "unsupported parameter: center of an excluded copy");
  switch (p.region) {
    case Region::CopyCusp:
    case Region::Boundary: {
      if (!p.t) throw std::domain_error("unsupported parameter: no angle tag");
      return boundary_param(Family::Newton, *p.t);
    }
    case Region::CopyCenter: {
      if (!p.t || p.m < 1)
        throw std::domain_error("unsupported parameter: center needs (t, m)");
      return center_in_copy(Family::Newton, *p.t, p.m);
    }
    case Region::CopyInterior: {
      if (!p.t) throw std::domain_error("unsupported parameter: no angle tag");
      long k = total_period(*p.t, 1);
      Map f = Map::cubic(a);
      auto period = attracting_period(f, 64 * k);
      if (!period || *period % k != 0)
        throw std::domain_error(
            "unsupported parameter: no attracting cycle matching the copy");
      long m = *period / k;
      auto mu = free_cycle_multiplier(f, *period);
      if (!mu || std::abs(*mu) >= 1.0)
        throw std::domain_error(
            "unsupported parameter: free cycle is not attracting");
      cplx lam = center_in_copy(Family::Newton, *p.t, m).value;
      // match the renormalized cycle multiplier on the Newton side
      for (int it = 0; it < 60; ++it) {
        auto cur = free_cycle_multiplier(Map::newton(lam), *period);
        if (!cur) break;
        cplx val = *cur - *mu;
        double h = 1e-6 * (1.0 + std::abs(lam));
        auto up = free_cycle_multiplier(Map::newton(lam + h), *period);
        auto dn = free_cycle_multiplier(Map::newton(lam - h), *period);
        if (!up || !dn) break;
        cplx der = (*up - *dn) / (2.0 * h);
        if (std::abs(der) < 1e-300) break;
        cplx stepv = val / der;
        lam -= stepv;
        if (std::abs(stepv) < 1e-11 * (1.0 + std::abs(lam))) break;
      }
      auto fin = free_cycle_multiplier(Map::newton(lam), *period);
      if (!fin || std::abs(*fin - *mu) > 1e-6)
        throw std::runtime_error("multiplier matching did not converge");
      ParamPoint out;
      out.family = Family::Newton;
      out.value = lam;
      out.region = Region::CopyInterior;
      out.t = p.t;
      out.k = k;
      out.m = m;
      out.err = std::abs(*fin - *mu);
      out.approximate = true;
      return out;
    }
    default:
      throw std::domain_error("unsupported parameter: outside the skeleton "
                              "(copies and the component boundary)");
  }
}

std::vector<CorrespondenceRow> correspondence_table(long max_den, long max_m) {
  std::vector<CorrespondenceRow> rows;
  for (const CuspAngle &c : cusp_angles(max_den)) {
    CorrespondenceRow cusp;
    cusp.t = c.t;
    cusp.k = c.k;
    cusp.m = 0;
    cusp.cubic_value = boundary_param(Family::Cubic, c.t).value;
    cusp.newton_value = boundary_param(Family::Newton, c.t).value;
    rows.push_back(cusp);
    for (long m = 1; m <= max_m; ++m) {
      CorrespondenceRow row;
      row.t = c.t;
      row.k = c.k;
      row.m = m;
      row.cubic_value = center_in_copy(Family::Cubic, c.t, m).value;
      row.newton_value = center_in_copy(Family::Newton, c.t, m).value;
      rows.push_back(row);
    }
  }
  return rows;
}

std::string correspondence_csv(const std::vector<CorrespondenceRow> &rows) {
  std::ostringstream os;
  os.precision(15);
  os << "t,k,m,re_a,im_a,re_lambda,im_lambda\n";
  for (const auto &r : rows)
    os << r.t.str() << "," << r.k << "," << r.m << "," << r.cubic_value.real()
       << "," << r.cubic_value.imag() << "," << r.newton_value.real() << ","
       << r.newton_value.imag() << "\n";
  return os.str();
}

std::string correspondence_json(const std::vector<CorrespondenceRow> &rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto &r : rows)
    arr.push_back({{"t", r.t.str()},
                   {"k", r.k},
                   {"m", r.m},
                   {"a", {r.cubic_value.real(), r.cubic_value.imag()}},
                   {"lambda",
                    {r.newton_value.real(), r.newton_value.imag()}}});
  return arr.dump(2);
}

} // namespace nmating
