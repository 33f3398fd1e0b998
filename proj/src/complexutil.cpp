#include "nmating/complexutil.hpp"

#include <sstream>

namespace nmating {

std::string SpherePoint::str() const {
  if (is_infinity()) return "inf";
  std::ostringstream os;
  os.precision(17);
  cplx z = plane();
  os << z.real() << (z.imag() < 0 ? "" : "+") << z.imag() << "i";
  return os.str();
}

double chordal(const SpherePoint &a, const SpherePoint &b) {
  if (a.at_inf_chart == b.at_inf_chart) {
    // same chart: the chordal metric has the same formula in both charts
    double na = std::norm(a.v), nb = std::norm(b.v);
    return std::abs(a.v - b.v) / std::sqrt((1.0 + na) * (1.0 + nb));
  }
  // mixed charts: d(z, 1/w) = |z w - 1| / sqrt((1+|z|^2)(1+|w|^2))
  cplx z = a.at_inf_chart ? b.v : a.v;
  cplx w = a.at_inf_chart ? a.v : b.v;
  return std::abs(z * w - 1.0) /
         std::sqrt((1.0 + std::norm(z)) * (1.0 + std::norm(w)));
}

std::array<cplx, 2> quadratic_roots(cplx b, cplx c) {
  cplx d = std::sqrt(b * b - 4.0 * c);
  // form the larger root first to avoid cancellation
  cplx q = (std::real(std::conj(b) * d) >= 0) ? -(b + d) / 2.0 : -(b - d) / 2.0;
  if (q == cplx(0, 0)) return {cplx(0, 0), -b};
  return {q, c / q};
}

std::array<cplx, 3> cubic_roots(cplx a2, cplx a1, cplx a0) {
  // depressed form t^3 + p t + q via z = t - a2/3
  cplx s = a2 / 3.0;
  cplx p = a1 - a2 * a2 / 3.0;
  cplx q = a0 - a1 * s + 2.0 * s * s * s;

  std::array<cplx, 3> out;
  double pn = std::abs(p), qn = std::abs(q);
  if (pn < 1e-30 && qn < 1e-30) {
    out = {-s, -s, -s};
    return out;
  }
  // Cardano with the numerically larger cube root
  cplx disc = std::sqrt(q * q / 4.0 + p * p * p / 27.0);
  cplx u3 = -q / 2.0 + disc;
  if (std::abs(u3) < std::abs(-q / 2.0 - disc)) u3 = -q / 2.0 - disc;
  cplx u = std::pow(u3, 1.0 / 3.0);
  const cplx w(-0.5, std::sqrt(3.0) / 2.0);
  for (int k = 0; k < 3; ++k) {
    cplx uk = u * (k == 0 ? cplx(1, 0) : (k == 1 ? w : w * w));
    cplx t = (std::abs(uk) < 1e-150) ? cplx(0, 0) : uk - p / (3.0 * uk);
    out[k] = t - s;
  }
  // Newton polish against the original cubic; the closed form alone loses
  // accuracy when the discriminant terms nearly cancel at large scale
  for (auto &z : out) {
    for (int it = 0; it < 12; ++it) {
      cplx f = ((z + a2) * z + a1) * z + a0;
      cplx df = (3.0 * z + 2.0 * a2) * z + a1;
      if (std::abs(df) < 1e-300) break;
      cplx step = f / df;
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
      z -= step;
      if (std::abs(step) < 1e-14 * (std::abs(z) + 1e-14)) break;
    }
  }
  return out;
}

std::string fmt_cplx(cplx z, int prec) {
  std::ostringstream os;
  os.precision(prec);
  os << z.real() << (z.imag() < 0 ? "" : "+") << z.imag() << "i";
  return os.str();
}

} // namespace nmating
