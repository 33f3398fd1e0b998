#include "nmating/boettcher.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace nmating {

namespace {

// truncated power series product, both starting at u^1, indices 1..n
std::vector<cplx> series_mul(const std::vector<cplx> &a,
                             const std::vector<cplx> &b, size_t n) {
  std::vector<cplx> r(n + 1, cplx(0, 0));
  for (size_t i = 1; i < a.size() && i <= n; ++i) {
    if (a[i] == cplx(0, 0)) continue;
    for (size_t j = 1; j < b.size() && i + j <= n; ++j)
      r[i + j] += a[i] * b[j];
  }
  return r;
}

cplx series_eval(const std::vector<cplx> &s, cplx u) {
  cplx acc(0, 0);
  for (size_t k = s.size(); k-- > 1;) acc = acc * u + s[k];
  return acc * u;
}

cplx series_eval_deriv(const std::vector<cplx> &s, cplx u) {
  cplx acc(0, 0);
  for (size_t k = s.size(); k-- > 2;) acc = acc * u + double(k) * s[k];
  return acc * u + (s.size() > 1 ? s[1] : cplx(0, 0));
}

// Taylor coefficients of f at c, orders 0..n, by trapezoid contour integral.
std::vector<cplx> taylor_at(const Map &f, cplx c, double radius, size_t n) {
  const size_t M = 512;
  std::vector<cplx> vals(M);
  for (size_t m = 0; m < M; ++m) {
    double th = 2.0 * M_PI * double(m) / double(M);
    vals[m] = f(c + std::polar(radius, th));
  }
  std::vector<cplx> out(n + 1);
  for (size_t k = 0; k <= n; ++k) {
    cplx acc(0, 0);
    for (size_t m = 0; m < M; ++m) {
      double th = 2.0 * M_PI * double(m) / double(M);
      acc += vals[m] * std::polar(1.0, -double(k) * th);
    }
    out[k] = acc / double(M) / std::pow(radius, double(k));
  }
  return out;
}

double dist_to_hazards(const Map &f, cplx c) {
  double d = 1e9;
  for (cplx cp : f.critical_points())
    if (std::abs(cp - c) > 1e-12) d = std::min(d, std::abs(cp - c));
  if (f.family() == Family::Newton)
    for (cplx p : f.poles()) d = std::min(d, std::abs(p - c));
  return d;
}

} // namespace

RayEngine::RayEngine(const Map &f, int subdiv, double outer_potential,
                     double inner_radius)
    : f_(f), J_(subdiv), G0_(outer_potential), rho0_(inner_radius) {}

cplx RayEngine::bottcher_inf(cplx z, int terms) const {
  if (f_.family() == Family::Newton)
    throw std::logic_error("no coordinate at infinity for Newton maps");
  // B(z) = z * prod (f^k(z)/f^(k-1)(z)^3)^(3^-k), principal branches
  cplx logB = std::log(z);
  cplx w = z;
  double p3 = 1.0;
  for (int k = 1; k <= terms; ++k) {
    cplx fw = f_(w);
    p3 /= 3.0;
    cplx ratio = fw / (w * w * w);
    logB += p3 * std::log(ratio);
    w = fw;
    if (std::abs(w) > 1e80) break;
  }
  return std::exp(logB);
}

SpherePoint RayEngine::external_base(const Angle &t, double level) {
  double g = G0_ * std::pow(3.0, -level / double(J_));
  cplx w = std::exp(cplx(g, 2.0 * M_PI * t.to_double()));
  cplx c2 = f_.family() == Family::Cubic ? 1.5 * f_.param() : cplx(0, 0);
  cplx z = w - c2 / 3.0;
  for (int it = 0; it < 60; ++it) {
    cplx B = bottcher_inf(z);
    cplx h = 1e-6 * (std::abs(z) + 1.0);
    cplx dB = (bottcher_inf(z + h) - bottcher_inf(z - h)) / (2.0 * h);
    cplx step = (B - w) / dB;
    z -= step;
    if (std::abs(step) < 1e-13 * std::abs(z)) break;
  }
  return SpherePoint::from_plane(z);
}

int RayEngine::basin_index(cplx center) {
  for (size_t i = 0; i < basins_.size(); ++i)
    if (std::abs(basins_[i].center - center) < 1e-9) return int(i);
  Basin b;
  b.center = center;
  build_center_series(b);
  basins_.push_back(std::move(b));
  return int(basins_.size()) - 1;
}

void RayEngine::build_center_series(Basin &b) {
  // local coordinate B with B(f(z)) = B(z)^2, B(c) = 0, B'(c) = f''(c)/2
  const size_t N = 26;
  double rad = std::min(0.35 * dist_to_hazards(f_, b.center), 0.25);
  if (rad < 1e-6) throw std::logic_error("degenerate superattracting center");
  auto a = taylor_at(f_, b.center, rad, N + 1);
  if (std::abs(a[1]) > 1e-7 || std::abs(a[2]) < 1e-9)
    throw std::logic_error("center is not superattracting of local degree 2");
  // F = f - c as a series starting at u^2
  std::vector<cplx> F(N + 2, cplx(0, 0));
  for (size_t k = 2; k <= N + 1; ++k) F[k] = a[k];
  // solve coefficient equations of B(F(u)) = B(u)^2 order by order
  std::vector<cplx> B(N + 1, cplx(0, 0));
  B[1] = a[2];
  std::vector<std::vector<cplx>> Fpow; // F^j truncated, j from 1
  Fpow.push_back(F);
  for (size_t m = 3; m <= N + 1; ++m) {
    // need F^j up to j = m/2
    while (Fpow.size() < m / 2)
      Fpow.push_back(series_mul(Fpow.back(), F, N + 1));
    cplx lhs(0, 0);
    for (size_t j = 1; j <= m / 2; ++j)
      if (m < Fpow[j - 1].size()) lhs += B[j] * Fpow[j - 1][m];
    cplx rhs_known(0, 0); // sum b_i b_l, i+l = m, both <= m-2
    for (size_t i = 2; i + 2 <= m; ++i) {
      size_t l = m - i;
      if (l < i || l > N) continue;
      cplx term = B[i] * B[l];
      rhs_known += (i == l) ? term : 2.0 * term;
    }
    B[m - 1] = (lhs - rhs_known) / (2.0 * B[1]);
  }
  b.series = std::move(B);
  // shrink the base radius until the base ring stays well inside the
  // contour disk where the series is trustworthy
  double rho = rho0_;
  for (int guard = 0; guard < 8; ++guard) {
    double rho_max = std::pow(rho, std::pow(2.0, -double(J_ - 1) / J_));
    double worst = 0;
    bool ok = true;
    for (int k = 0; k < 16; ++k) {
      cplx w = std::polar(rho_max, 2.0 * M_PI * k / 16.0);
      cplx u = w / b.series[1];
      for (int it = 0; it < 60; ++it) {
        cplx val = series_eval(b.series, u) - w;
        cplx der = series_eval_deriv(b.series, u);
        if (std::abs(der) < 1e-300) { ok = false; break; }
        cplx step = val / der;
        u -= step;
        if (std::abs(step) < 1e-15) break;
      }
      worst = std::max(worst, std::abs(u));
      if (!ok) break;
    }
    if (ok && worst < 0.55 * rad) break;
    rho *= 0.2;
  }
  b.rho0 = rho;
}

cplx RayEngine::bottcher_center(int basin, cplx z) const {
  const Basin &b = basins_.at(basin);
  return series_eval(b.series, z - b.center);
}

SpherePoint RayEngine::internal_base(int basin, const Angle &t, double level) {
  const Basin &b = basins_.at(basin);
  double rho = std::pow(b.rho0, std::pow(2.0, -level / double(J_)));
  cplx w = std::polar(rho, 2.0 * M_PI * t.to_double());
  cplx u = w / b.series[1];
  for (int it = 0; it < 80; ++it) {
    cplx val = series_eval(b.series, u) - w;
    cplx der = series_eval_deriv(b.series, u);
    cplx step = val / der;
    u -= step;
    if (std::abs(step) < 1e-15 * (std::abs(u) + 1e-18)) break;
  }
  return SpherePoint::from_plane(b.center + u);
}

SpherePoint RayEngine::pullback_toward(const SpherePoint &target,
                                       const SpherePoint &predictor) {
  auto pre = f_.preimages(target);
  if (pre.empty()) throw std::runtime_error("pullback: no preimages");
  size_t best = 0, second = 0;
  double bd = 1e18, sd = 1e18;
  for (size_t i = 0; i < pre.size(); ++i) {
    double d = chordal(pre[i], predictor);
    if (d < bd) {
      sd = bd;
      second = best;
      bd = d;
      best = i;
    } else if (d < sd) {
      sd = d;
      second = i;
    }
  }
  if (pre.size() > 1 && chordal(pre[best], pre[second]) < 1e-9)
    throw std::runtime_error("ray pullback ambiguous near a critical point");
  return pre[best];
}

int RayEngine::copy_ctx(int basin, cplx copy_center) {
  for (size_t i = 0; i < copies_.size(); ++i)
    if (copies_[i].first == basin &&
        std::abs(copies_[i].second - copy_center) < 1e-9)
      return 1000 + int(i);
  copies_.emplace_back(basin, copy_center);
  return 1000 + int(copies_.size()) - 1;
}

SpherePoint RayEngine::point_generic(int ctx, const Angle &t, double level) {
  Key key{ctx, t, llround(level * 1024.0)};
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;

  SpherePoint result;
  if (ctx >= 1000) {
    const auto &cp = copies_.at(size_t(ctx - 1000));
    SpherePoint tgt = point_generic(cp.first, t, level);
    SpherePoint pred = level < 0.5
                           ? SpherePoint::from_plane(cp.second)
                           : point_generic(ctx, t, level - 0.5);
    result = pullback_toward(tgt, pred);
  } else if (level < double(J_)) {
    result = (ctx < 0) ? external_base(t, level) : internal_base(ctx, t, level);
  } else {
    long mult = ctx < 0 ? 3 : 2;
    SpherePoint tgt = point_generic(ctx, t.times(mult), level - J_);
    SpherePoint pred = point_generic(ctx, t, level - 1.0);
    result = pullback_toward(tgt, pred);
  }
  cache_.emplace(key, result);
  return result;
}

SpherePoint RayEngine::external_point(const Angle &t, double level) {
  if (f_.family() == Family::Newton)
    throw std::logic_error("Newton maps have no external rays");
  return point_generic(-1, t, level);
}

SpherePoint RayEngine::internal_point(int basin, const Angle &t, double level) {
  return point_generic(basin, t, level);
}

SpherePoint RayEngine::copy_point(int basin, cplx copy_center, const Angle &t,
                                  double level) {
  return point_generic(copy_ctx(basin, copy_center), t, level);
}

Landing RayEngine::trace_generic(int ctx, const Angle &t, double tol,
                                 double max_level) {
  SpherePoint p2 = point_generic(ctx, t, 0);
  SpherePoint p1 = point_generic(ctx, t, 1);
  for (double s = 2; s <= max_level; s += 1.0) {
    SpherePoint p0 = point_generic(ctx, t, s);
    if (chordal(p0, p1) < tol && chordal(p1, p2) < tol)
      return {true, p0, s};
    p2 = p1;
    p1 = p0;
  }
  return {false, p1, max_level};
}

std::vector<SpherePoint> RayEngine::arc_generic(int ctx, const Angle &t,
                                                double to_level,
                                                double max_gap) {
  std::vector<std::pair<double, SpherePoint>> pts;
  for (double s = 0; s <= to_level; s += 1.0)
    pts.emplace_back(s, point_generic(ctx, t, s));
  // refine dyadically until chordal gaps are small
  for (size_t i = 0; i + 1 < pts.size();) {
    double ds = pts[i + 1].first - pts[i].first;
    if (chordal(pts[i].second, pts[i + 1].second) > max_gap && ds > 1.0 / 64) {
      double mid = 0.5 * (pts[i].first + pts[i + 1].first);
      pts.insert(pts.begin() + i + 1,
                 {mid, point_generic(ctx, t, mid)});
    } else {
      ++i;
    }
  }
  std::vector<SpherePoint> out;
  out.reserve(pts.size());
  for (auto &p : pts) out.push_back(p.second);
  return out;
}

Landing RayEngine::trace_external(const Angle &t, double tol,
                                  double max_level) {
  return trace_generic(-1, t, tol, max_level);
}

Landing RayEngine::trace_internal(int basin, const Angle &t, double tol,
                                  double max_level) {
  return trace_generic(basin, t, tol, max_level);
}

Landing RayEngine::trace_copy(int basin, cplx copy_center, const Angle &t,
                              double tol, double max_level) {
  return trace_generic(copy_ctx(basin, copy_center), t, tol, max_level);
}

std::vector<SpherePoint> RayEngine::external_arc(const Angle &t,
                                                 double to_level,
                                                 double max_gap) {
  return arc_generic(-1, t, to_level, max_gap);
}

std::vector<SpherePoint> RayEngine::internal_arc(int basin, const Angle &t,
                                                 double to_level,
                                                 double max_gap) {
  return arc_generic(basin, t, to_level, max_gap);
}

std::vector<SpherePoint> RayEngine::copy_arc(int basin, cplx copy_center,
                                             const Angle &t, double to_level,
                                             double max_gap) {
  return arc_generic(copy_ctx(basin, copy_center), t, to_level, max_gap);
}

int classify_basin(const Map &f, SpherePoint z, int maxit, double tol) {
  std::vector<cplx> centers;
  switch (f.family()) {
  case Family::Cubic:
    centers = {cplx(0, 0)};
    break;
  case Family::CubicSym:
    centers = {cplx(0, 1.0 / std::sqrt(2.0)), cplx(0, -1.0 / std::sqrt(2.0))};
    break;
  case Family::Newton: {
    auto r = f.newton_roots();
    centers = {r[0], r[1], r[2]};
    break;
  }
  }
  for (int i = 0; i < maxit; ++i) {
    if (!z.at_inf_chart) {
      for (size_t c = 0; c < centers.size(); ++c)
        if (std::abs(z.v - centers[c]) < tol) return int(c);
    } else if (f.family() != Family::Newton && std::abs(z.v) < 1e-8) {
      return -1; // escaped to infinity
    }
    z = f(z);
  }
  return -2;
}

} // namespace nmating
