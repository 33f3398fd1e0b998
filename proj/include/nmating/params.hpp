#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nmating/angles.hpp"
#include "nmating/maps.hpp"

namespace nmating {

// Parameter planes of the two families with a persistent superattracting
// fixed point: cubic z^2(z + 3a/2) (basin of 0) and the Newton family
// (basin of the root p1 = -1/2-lambda). H denotes the component of
// parameters whose free critical orbit falls into that basin: H0 around
// a = 0, H- around lambda = -1/2. On a canonical fundamental region
// (cubic: closure of the quadrant Q = {Re > 0, Im < 0}; Newton: closure of
// Omega_- = {Im > 0, Re <= 0}) the position of the free critical value in
// the basin's Boettcher coordinate is a conformal bijection onto the slit
// disk D \ [0,1]; its circle boundary values parametrize the component
// boundary by an internal angle t in (0,1).

enum class Region {
  Interior,     // inside H0 resp. H-
  Boundary,     // boundary point a(t)/lambda(t) that is not a copy cusp:
                // the free critical point is the landing point of the
                // internal ray of angle t/2
  CopyCusp,     // boundary point carrying a Mandelbrot copy (t/2 periodic
                // under doubling, period k >= 2)
  CopyCenter,   // superattracting parameter inside a copy
  CopyInterior, // other parameter inside a copy
  Other,
};

struct ParamPoint {
  Family family = Family::Cubic; // Cubic or Newton
  cplx value{0, 0};
  Region region = Region::Other;
  std::optional<Angle> t; // boundary angle / angle of the carrying copy
  long k = 0;             // doubling period of t/2 (copy tags)
  long m = 0;             // renormalized critical period; total period k*m
  double err = 0;         // numerical error estimate for `value`
  bool approximate = false;
};

// Angles whose boundary point carries a copy: t = 2j/q with q odd >= 3 and
// gcd(j, q) = 1, so t/2 = j/q is exactly k-periodic under doubling with
// k = ord_q(2) >= 2. Sorted by t. The slit endpoint t = 0 (whose cubic
// limit points along the axes include the excluded copies with cusps
// +-4i/3) has period 1 and is never listed.
struct CuspAngle {
  Angle t;
  long k;
};
std::vector<CuspAngle> cusp_angles(long max_den);

// Position of the free critical value in the Boettcher coordinate of the
// fixed superattracting basin, extended along the critical orbit: the
// orbit is iterated into the disk where the local coordinate converges and
// the value is the 2^n-th root of the deep coordinate. The modulus is
// branch-free. The argument branch is fixed by `predictor` when given (any
// estimate with argument error below pi/2^n); without one the value is
// continued from the family center along the parameter segment, growing
// steps adaptively. Throws std::domain_error when the critical orbit does
// not reach the basin within the iteration cap.
cplx critical_value_position(const Map &f, std::optional<cplx> predictor = {});
cplx critical_value_position(const ParamPoint &p);

// Boundary point at internal angle t in (0,1): continuation in r of the
// solution of Phi(p) = r e^{2 pi i t} up to r = 1 - 1e-4, each step solving
// the exact deep-level equation by Newton's method in the parameter. The
// returned err is the distance between the last two continuation steps.
// Throws std::domain_error at the slit endpoint t = 0 (two distinct limit
// points) and std::runtime_error on step collapse, reporting the last good
// parameter in the message.
ParamPoint boundary_param(Family family, const Angle &t);

// Boundary point at t = 1/2 to machine precision. There the critical value
// lands on a prefixed boundary point (cubic: f_a^2(-a) is a nonzero fixed
// point; Newton family: N(0) is a pole), an algebraic condition solved by
// Newton's method seeded from the continuation value. Throws
// std::domain_error for any other angle.
ParamPoint boundary_param_exact(Family family, const Angle &t);

// Superattracting parameter inside the copy at angle t whose free critical
// point has exact period k*m: Newton's method on the periodicity equation
// (cubic: f_a^{km}(-a) = -a; Newton family: N^{km}(0) = 0), seeded from
// the cusp pushed into the copy (m = 1) or from the affine image of the
// real quadratic center of period m (m in 2..4). Validated: residual below
// 1e-12, no proper divisor of k*m is a period, the free critical orbit
// stays clear of the fixed basin, and the solution stays within the copy
// scale of the cusp. Throws std::domain_error on bad (t, m) and
// std::runtime_error when the solve or a validation fails.
ParamPoint center_in_copy(Family family, const Angle &t, long m);

// The cubic -> Newton parameter correspondence on its computable skeleton:
// cusp a(t) -> cusp lambda(t), copy center -> copy center with the same
// (t, m), non-cusp boundary a(t) -> lambda(t). Copy interior points with
// an attracting free cycle are matched through the cycle multiplier and
// flagged approximate. Values are first reflected into the canonical
// region (a -> -a, conjugation). Throws std::domain_error for untagged
// input, Newton-family input, and the two excluded copies (cusps +-4i/3,
// centers +-i sqrt 2): there the fixed external rays 0 and 1/2 land
// together on both sides and the glued sphere degenerates.
ParamPoint correspondence(const ParamPoint &p);

// Discrete correspondence table over cusp_angles(max_den): one cusp row
// (m = 0) per angle, then center rows for m = 1..max_m.
struct CorrespondenceRow {
  Angle t;
  long k = 0, m = 0;
  cplx cubic_value, newton_value;
};
std::vector<CorrespondenceRow> correspondence_table(long max_den, long max_m);
std::string correspondence_csv(const std::vector<CorrespondenceRow> &rows);
std::string correspondence_json(const std::vector<CorrespondenceRow> &rows);

} // namespace nmating
