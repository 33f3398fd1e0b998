#include <cmath>

#include "doctest.h"
#include "nmating/mating.hpp"

using namespace nmating;

namespace {

const cplx kCubicCenter(1.001739727069808, -0.519355901344767);
const cplx kNewtonCenter(0.0, 0.333321287241975);

std::pair<SemiConjugacy, SemiConjugacy> &mpair() {
  static auto p =
      SemiConjugacy::pair(kCubicCenter, kNewtonCenter, Angle(1, 3), 12);
  return p;
}
SemiConjugacy &sd() { return mpair().first; }
SemiConjugacy &sc() { return mpair().second; }

const SpherePoint &newton_vertex(const std::string &name) {
  for (const auto &v : sd().target().vertices())
    if (v.name == name) return v.pos;
  REQUIRE_MESSAGE(false, "missing vertex " << name);
  return sd().target().vertices().front().pos;
}

} // namespace

TEST_CASE("psi sends marked points to their Newton partners") {
  // the repelling fixed point of the odd family maps to infinity
  // infinity is a multiplier-3/2 repelling point, so its nests shrink at
  // the slowest rate in the family; the bound reflects that
  PsiResult r = sd().psi(SpherePoint(cplx(0, 0)));
  CHECK(chordal(r.image, SpherePoint::infinity()) < r.err + 1e-6);
  CHECK(r.err < 0.15);

  // the landings of rays 1/3 and 2/3 map to the two poles
  PsiResult r13 = sd().psi(sd().landing(Angle(1, 3)));
  CHECK(chordal(r13.image, newton_vertex("q")) < r13.err + 2e-5);
  PsiResult r23 = sd().psi(sd().landing(Angle(2, 3)));
  CHECK(chordal(r23.image, newton_vertex("q'")) < r23.err + 2e-5);

  // the cubic boundary fixed point also maps to infinity
  PsiResult rc = sc().psi(sc().landing(Angle(0, 1)));
  CHECK(chordal(rc.image, SpherePoint::infinity()) < rc.err + 1e-6);
}

TEST_CASE("psi rejects escaping and interior points") {
  CHECK_THROWS_AS((void)sd().psi(SpherePoint(cplx(3.0, 2.0))),
                  std::domain_error);
  // basin center of the odd family
  CHECK_THROWS_AS((void)sd().psi(SpherePoint(cplx(0, 1.0 / std::sqrt(2.0)))),
                  std::domain_error);
  // interior cubic point attracted to the superattracting basin
  CHECK_THROWS_AS((void)sc().psi(SpherePoint(cplx(0.05, -0.02))),
                  std::domain_error);
}

TEST_CASE("ray equivalence matches the angle gluing") {
  // t on the cubic side glues with -t on the odd side
  EquivResult e0 = ray_equivalent(sc(), Angle(0, 1), sd(), Angle(0, 1));
  CHECK(e0.equal);
  CHECK(e0.chain.size() == 2);

  EquivResult e1 = ray_equivalent(sc(), Angle(1, 3), sd(), Angle(2, 3));
  CHECK(e1.equal);

  EquivResult bad = ray_equivalent(sc(), Angle(0, 1), sd(), Angle(1, 3));
  CHECK_FALSE(bad.equal);
  CHECK(bad.distance > 10 * bad.allowance);

  for (const Angle &t : {Angle(1, 5), Angle(2, 7), Angle(3, 11), Angle(4, 13),
                         Angle(5, 17)}) {
    EquivResult e = ray_equivalent(sc(), t, sd(), t.negated());
    CHECK_MESSAGE(e.equal, "pair " << t.str() << " should be glued, distance "
                                   << e.distance << " allowance "
                                   << e.allowance);
  }
  // same-side sanity: distinct fixed classes stay apart
  EquivResult ee = ray_equivalent(sd(), Angle(1, 3), sd(), Angle(2, 3));
  CHECK_FALSE(ee.equal);
}

TEST_CASE("conjugacy residuals stay within nest bounds and refine") {
  for (const Angle &t : {Angle(1, 5), Angle(3, 11), Angle(2, 7)}) {
    SpherePoint z = sd().landing(t);
    ResidualReport r8 = sd().residual(z, 8);
    ResidualReport r16 = sd().residual(z, 16);
    CHECK(r8.within());
    CHECK(r16.within());
    CHECK(r16.distance < r8.allowance);
  }
  SpherePoint z = sc().landing(Angle(5, 7));
  ResidualReport r = sc().residual(z, 12);
  CHECK(r.within());
}

TEST_CASE("seeded verification is deterministic and clean") {
  VerifyReport a = verify_semiconjugacy(sd(), 25, 20260815);
  VerifyReport b = verify_semiconjugacy(sd(), 25, 20260815);
  CHECK(a.samples == 25);
  CHECK(a.violations == 0);
  CHECK(a.max_residual == b.max_residual);
  CHECK(a.mean_residual == b.mean_residual);
  CHECK(a.max_residual <= a.max_allowance);

  VerifyReport c = verify_semiconjugacy(sc(), 25, 7);
  CHECK(c.samples == 25);
  CHECK(c.violations == 0);
  CHECK(c.has_a);
  CHECK(c.to_json().find("max_residual") != std::string::npos);
}

TEST_CASE("sphere coverage by the two semi-conjugacies") {
  CoverageReport rep = surjectivity_sample(sd(), sc(), 36);
  CHECK(rep.grid_points == 36 * 36);
  CHECK(rep.fatou_cubic > 0);
  CHECK(rep.fatou_dbas > 0);
  CHECK(rep.uncovered_fraction < 0.02);
}
