#include "nmating/maps.hpp"

#include <stdexcept>

namespace nmating {

cplx Map::operator()(cplx z) const {
  switch (fam_) {
  case Family::Cubic:
    return z * z * (z + 1.5 * par_);
  case Family::CubicSym:
    return z * z * z + 1.5 * z;
  case Family::Newton: {
    cplx num = 2.0 * z * z * z - qhat();
    cplx den = 3.0 * z * z + phat();
    return num / den;
  }
  }
  return z;
}

SpherePoint Map::operator()(const SpherePoint &p) const {
  if (p.is_infinity()) {
    if (fam_ == Family::Newton) return SpherePoint::infinity();
    return SpherePoint::infinity(); // polynomials fix infinity too
  }
  if (p.at_inf_chart) {
    cplx w = in_inf_chart(p.v);
    if (std::abs(w) < 1.0 / SpherePoint::chart_switch)
      return SpherePoint(w, true);
    return SpherePoint(1.0 / w, false);
  }
  cplx y = (*this)(p.v);
  if (!std::isfinite(y.real()) || !std::isfinite(y.imag())) {
    // Newton pole hit exactly
    return SpherePoint::infinity();
  }
  return SpherePoint::from_plane(y);
}

cplx Map::derivative(cplx z) const {
  switch (fam_) {
  case Family::Cubic:
    return 3.0 * z * z + 3.0 * par_ * z;
  case Family::CubicSym:
    return 3.0 * z * z + 1.5;
  case Family::Newton: {
    cplx den = 3.0 * z * z + phat();
    cplx num = 2.0 * z * z * z - qhat();
    return (6.0 * z * z * den - num * 6.0 * z) / (den * den);
  }
  }
  return cplx(0, 0);
}

cplx Map::in_inf_chart(cplx w) const {
  switch (fam_) {
  case Family::Cubic: {
    // 1/f(1/w) = w^3 / (1 + (3a/2) w)
    return w * w * w / (1.0 + 1.5 * par_ * w);
  }
  case Family::CubicSym:
    return w * w * w / (1.0 + 1.5 * w * w);
  case Family::Newton: {
    // 1/N(1/w) = w (3 + phat w^2) / (2 - qhat w^3)
    return w * (3.0 + phat() * w * w) / (2.0 - qhat() * w * w * w);
  }
  }
  return w;
}

cplx Map::inf_multiplier() const {
  if (fam_ == Family::Newton) return cplx(1.5, 0);
  return cplx(0, 0); // superattracting for polynomials in the w chart
}

std::vector<cplx> Map::preimages(cplx y) const {
  switch (fam_) {
  case Family::Cubic: {
    auto r = cubic_roots(1.5 * par_, cplx(0, 0), -y);
    return {r[0], r[1], r[2]};
  }
  case Family::CubicSym: {
    auto r = cubic_roots(cplx(0, 0), cplx(1.5, 0), -y);
    return {r[0], r[1], r[2]};
  }
  case Family::Newton: {
    // 2z^3 - qhat = y (3z^2 + phat)  =>  z^3 - (3y/2) z^2 - (phat y + qhat)/2 = 0
    auto r = cubic_roots(-1.5 * y, cplx(0, 0), -(phat() * y + qhat()) / 2.0);
    return {r[0], r[1], r[2]};
  }
  }
  return {};
}

std::vector<SpherePoint> Map::preimages(const SpherePoint &y) const {
  std::vector<SpherePoint> out;
  if (y.is_infinity()) {
    if (fam_ == Family::Newton) {
      out.push_back(SpherePoint::infinity());
      for (cplx p : poles()) out.push_back(SpherePoint::from_plane(p));
    } else {
      out.push_back(SpherePoint::infinity());
    }
    return out;
  }
  cplx yv = y.plane();
  if (y.at_inf_chart && std::abs(y.v) < 1e-12 && fam_ != Family::Newton) {
    // truly huge target for a polynomial; the plane cubic would overflow,
    // so solve in the w chart where preimages sit near the cube roots
    cplx wt = y.v;
    cplx w0 = std::pow(wt, 1.0 / 3.0);
    const cplx rot(-0.5, std::sqrt(3.0) / 2.0);
    for (int k = 0; k < 3; ++k) {
      cplx w = w0 * (k == 0 ? cplx(1, 0) : (k == 1 ? rot : rot * rot));
      // Newton on g(w) = in_inf_chart(w) - wt
      for (int it = 0; it < 40; ++it) {
        cplx h = 1e-9 * (std::abs(w) + 1e-12);
        cplx g = in_inf_chart(w) - wt;
        cplx dg = (in_inf_chart(w + h) - in_inf_chart(w - h)) / (2.0 * h);
        if (std::abs(dg) < 1e-300) break;
        cplx step = g / dg;
        w -= step;
        if (std::abs(step) < 1e-15 * (std::abs(w) + 1e-15)) break;
      }
      out.push_back(SpherePoint(w, true));
    }
    return out;
  }
  for (cplx z : preimages(yv)) out.push_back(SpherePoint::from_plane(z));
  return out;
}

cplx Map::phat() const {
  if (fam_ != Family::Newton) throw std::logic_error("phat: not a Newton map");
  return -(0.75 + par_ * par_);
}

cplx Map::qhat() const {
  if (fam_ != Family::Newton) throw std::logic_error("qhat: not a Newton map");
  return par_ * par_ - 0.25;
}

std::array<cplx, 3> Map::newton_roots() const {
  if (fam_ != Family::Newton)
    throw std::logic_error("newton_roots: not a Newton map");
  return newton_roots_of(par_);
}

std::array<cplx, 2> Map::poles() const {
  if (fam_ != Family::Newton) throw std::logic_error("poles: not a Newton map");
  cplx s = std::sqrt(-phat() / 3.0);
  return {s, -s};
}

cplx Map::newton_copreimage(cplx root) const {
  // N(z) = r has the double root z = r and the simple root z = -r/2 + O(...)
  // Exactly: 2z^3 - qhat - r(3z^2 + phat) = 2(z - r)^2 (z + r/2 + c) with the
  // residual fixed by the coefficients; solve and drop the two copies of r.
  auto pre = preimages(root);
  cplx best = pre[0];
  double bd = -1;
  for (cplx z : pre) {
    double d = std::abs(z - root);
    if (d > bd) {
      bd = d;
      best = z;
    }
  }
  return best;
}

std::vector<cplx> Map::critical_points() const {
  switch (fam_) {
  case Family::Cubic:
    return {cplx(0, 0), -par_};
  case Family::CubicSym: {
    double c = 1.0 / std::sqrt(2.0);
    return {cplx(0, c), cplx(0, -c)};
  }
  case Family::Newton: {
    auto r = newton_roots();
    return {r[0], r[1], r[2], cplx(0, 0)};
  }
  }
  return {};
}

} // namespace nmating
