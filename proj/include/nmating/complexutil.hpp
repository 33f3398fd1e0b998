#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

namespace nmating {

using cplx = std::complex<double>;

// Point on the Riemann sphere. Values with |z| > chart_switch are stored in
// the w = 1/z chart so infinity and its neighborhood stay representable.
struct SpherePoint {
  cplx v{0.0, 0.0};
  bool at_inf_chart = false;

  SpherePoint() = default;
  SpherePoint(cplx z, bool inf_chart = false) : v(z), at_inf_chart(inf_chart) {}

  static constexpr double chart_switch = 4.0;

  static SpherePoint infinity() { return SpherePoint(cplx(0, 0), true); }

  static SpherePoint from_plane(cplx z) {
    if (std::abs(z) > chart_switch) return SpherePoint(1.0 / z, true);
    return SpherePoint(z);
  }

  bool is_infinity() const { return at_inf_chart && v == cplx(0, 0); }

  // Finite-plane value; huge but finite surrogate for infinity itself.
  cplx plane() const {
    if (!at_inf_chart) return v;
    if (v == cplx(0, 0)) return cplx(1e300, 0);
    return 1.0 / v;
  }

  std::string str() const;
};

// Chordal distance on the sphere, bounded by 1 (half the usual diameter 2).
inline double chordal(cplx a, cplx b) {
  double na = std::norm(a), nb = std::norm(b);
  if (std::isinf(na) && std::isinf(nb)) return 0.0;
  if (std::isinf(na)) return 1.0 / std::sqrt(1.0 + nb);
  if (std::isinf(nb)) return 1.0 / std::sqrt(1.0 + na);
  return std::abs(a - b) / std::sqrt((1.0 + na) * (1.0 + nb));
}

double chordal(const SpherePoint &a, const SpherePoint &b);

// All three roots of z^3 + a2 z^2 + a1 z + a0 = 0, closed form plus one
// Newton polish step per root.
std::array<cplx, 3> cubic_roots(cplx a2, cplx a1, cplx a0);

// Roots of the quadratic z^2 + b z + c = 0.
std::array<cplx, 2> quadratic_roots(cplx b, cplx c);

// Complex sqrt branch continuous along a path: picks the sqrt of z closest
// to the reference value ref.
inline cplx sqrt_near(cplx z, cplx ref) {
  cplx r = std::sqrt(z);
  return std::abs(r - ref) <= std::abs(-r - ref) ? r : -r;
}

// Index of the entry of roots nearest to target.
template <size_t N>
size_t nearest_index(const std::array<cplx, N> &roots, cplx target) {
  size_t best = 0;
  double bd = std::abs(roots[0] - target);
  for (size_t i = 1; i < N; ++i) {
    double d = std::abs(roots[i] - target);
    if (d < bd) {
      bd = d;
      best = i;
    }
  }
  return best;
}

std::string fmt_cplx(cplx z, int prec = 17);

} // namespace nmating
