#pragma once

#include <array>
#include <vector>

#include "nmating/complexutil.hpp"

namespace nmating {

// The three map families under study.
//
//   Cubic    f_a(z)      = z^3 + (3a/2) z^2
//              critical points 0 and -a; 0 is a superattracting fixed point
//              with immediate basin A1; A1' is the other preimage component,
//              centered at -3a/2.
//   CubicSym f(z)        = z^3 + (3/2) z
//              critical points +-i/sqrt(2), both superattracting fixed,
//              with basins A2 (upper) and A3 (lower); z=0 is a repelling
//              fixed point on the Julia set.
//   Newton   N_lambda(z) = (2z^3 - qhat) / (3z^2 + phat)
//              phat = -(3/4 + lambda^2), qhat = lambda^2 - 1/4;
//              the Newton map of a cubic with roots -1/2-lambda, -1/2+lambda,
//              1; each root is superattracting fixed; infinity is repelling
//              fixed; the free critical point is x0 = 0.
enum class Family { Cubic, CubicSym, Newton };

class Map {
public:
  static Map cubic(cplx a) { return Map(Family::Cubic, a); }
  static Map cubic_sym() { return Map(Family::CubicSym, cplx(0, 0)); }
  static Map newton(cplx lambda) { return Map(Family::Newton, lambda); }

  Family family() const { return fam_; }
  cplx param() const { return par_; }

  cplx operator()(cplx z) const;
  SpherePoint operator()(const SpherePoint &p) const;
  cplx derivative(cplx z) const;

  // The map written in the w = 1/z chart at infinity: w -> 1/f(1/w).
  cplx in_inf_chart(cplx w) const;
  // Derivative of the w-chart map at w = 0 (multiplier at infinity).
  cplx inf_multiplier() const;

  // All preimages of y (3 with multiplicity, fewer listed when y = f(inf)
  // pulls back to infinity for Newton maps).
  std::vector<cplx> preimages(cplx y) const;
  std::vector<SpherePoint> preimages(const SpherePoint &y) const;

  // Newton accessors (family() == Newton required)
  cplx phat() const;
  cplx qhat() const;
  std::array<cplx, 3> newton_roots() const; // B1, B2, B3 centers
  std::array<cplx, 2> poles() const;        // preimages of infinity
  // The co-preimage of root r: the second finite point mapping to r.
  cplx newton_copreimage(cplx root) const;

  // superattracting cycle data used by internal coordinates
  std::vector<cplx> critical_points() const;

private:
  Map(Family f, cplx p) : fam_(f), par_(p) {}
  Family fam_;
  cplx par_;
};

// Newton root ordering convention for lambda in the left half disk
// (Re lambda < 0 region of the parameter space used here): B1 = -1/2-lambda,
// B2 = -1/2+lambda, B3 = 1.
inline std::array<cplx, 3> newton_roots_of(cplx lambda) {
  return {cplx(-0.5, 0) - lambda, cplx(-0.5, 0) + lambda, cplx(1, 0)};
}

} // namespace nmating
