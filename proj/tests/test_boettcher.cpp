#include <doctest.h>

#include <random>

#include "nmating/boettcher.hpp"

using namespace nmating;

namespace {
const double SQ2 = std::sqrt(2.0);
const double SQ32 = std::sqrt(1.5);
} // namespace

TEST_CASE("coordinate at infinity: functional equation and asymptotics") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (Map f : {Map::cubic(cplx(0.7, -0.2)), Map::cubic_sym()}) {
    RayEngine rays(f);
    for (int i = 0; i < 25; ++i) {
      cplx z = std::polar(6.0 + 40.0 * std::abs(u(rng)), M_PI * u(rng));
      cplx B = rays.bottcher_inf(z);
      cplx Bf = rays.bottcher_inf(f(z));
      CHECK(std::abs(Bf - B * B * B) < 1e-9 * std::abs(B * B * B));
    }
    cplx big(7e7, -3e7);
    CHECK(std::abs(rays.bottcher_inf(big) / big - 1.0) < 1e-6);
  }
}

TEST_CASE("external ray points satisfy the pullback relation") {
  std::mt19937_64 rng(43);
  for (Map f : {Map::cubic(cplx(0.4, 0.1)), Map::cubic_sym()}) {
    RayEngine rays(f);
    for (int i = 0; i < 6; ++i) {
      Angle t(long(rng() % 97), 97);
      for (double s : {3.0, 18.5, 40.0, 77.25}) {
        SpherePoint p = rays.external_point(t, s + rays.subdiv());
        SpherePoint fp = f(p);
        SpherePoint q = rays.external_point(t.times(3), s);
        CHECK(chordal(fp, q) < 1e-8);
      }
    }
  }
}

TEST_CASE("external co-landing pairs of the symmetric cubic") {
  RayEngine rays(Map::cubic_sym());
  auto land = [&](long p, long q) {
    Landing l = rays.trace_external(Angle(p, q));
    REQUIRE(l.landed);
    return l.point.plane();
  };
  // rays 0 and 1/2 land at the repelling fixed point 0
  CHECK(std::abs(land(0, 1)) < 1e-4);
  CHECK(std::abs(land(1, 2)) < 1e-4);
  // rays 1/3 and 1/6 land at the upper preimage i sqrt(3/2)
  CHECK(std::abs(land(1, 3) - cplx(0, SQ32)) < 1e-4);
  CHECK(std::abs(land(1, 6) - cplx(0, SQ32)) < 1e-4);
  // rays 2/3 and 5/6 land at the lower preimage -i sqrt(3/2)
  CHECK(std::abs(land(2, 3) - cplx(0, -SQ32)) < 1e-4);
  CHECK(std::abs(land(5, 6) - cplx(0, -SQ32)) < 1e-4);
  // a period-two pair: 1/4 <-> 3/4 land on a two-cycle, symmetric under -z
  Landing l14 = rays.trace_external(Angle(1, 4));
  Landing l34 = rays.trace_external(Angle(3, 4));
  REQUIRE(l14.landed);
  REQUIRE(l34.landed);
  CHECK(std::abs(l14.point.plane() + l34.point.plane()) < 1e-4);
  Map fsym = Map::cubic_sym();
  CHECK(std::abs(fsym(l14.point.plane()) - l34.point.plane()) < 1e-4);
}

TEST_CASE("local coordinate at a superattracting center") {
  Map f = Map::cubic_sym();
  RayEngine rays(f);
  int b2 = rays.basin_index(cplx(0, 1 / SQ2));
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 40; ++i) {
    cplx z = cplx(0, 1 / SQ2) + std::polar(0.04 * std::abs(u(rng)), M_PI * u(rng));
    cplx B = rays.bottcher_center(b2, z);
    cplx Bf = rays.bottcher_center(b2, f(z));
    CHECK(std::abs(Bf - B * B) < 1e-10);
  }
  // normalization: derivative at the center is f''(c)/2 = 3c
  cplx c(0, 1 / SQ2), h(1e-7, 0);
  CHECK(std::abs(rays.bottcher_center(b2, c + h) / h - 3.0 * c) < 1e-4);
}

TEST_CASE("internal rays: pullback relation and landings in both basins") {
  Map f = Map::cubic_sym();
  RayEngine rays(f);
  int b2 = rays.basin_index(cplx(0, 1 / SQ2));
  int b3 = rays.basin_index(cplx(0, -1 / SQ2));
  for (int b : {b2, b3}) {
    for (long num : {1L, 4L, 11L}) {
      Angle t(num, 13);
      for (double s : {2.0, 25.0, 61.5}) {
        SpherePoint p = rays.internal_point(b, t, s + rays.subdiv());
        CHECK(chordal(f(p), rays.internal_point(b, t.times(2), s)) < 1e-8);
      }
    }
  }
  // fixed internal ray of each basin lands at the fixed point 0
  Landing u0 = rays.trace_internal(b2, Angle(0, 1));
  Landing d0 = rays.trace_internal(b3, Angle(0, 1));
  REQUIRE(u0.landed);
  REQUIRE(d0.landed);
  CHECK(std::abs(u0.point.plane()) < 1e-4);
  CHECK(std::abs(d0.point.plane()) < 1e-4);
  // the half rays land at the finite preimages of 0 bounding each basin
  Landing uh = rays.trace_internal(b2, Angle(1, 2));
  Landing dh = rays.trace_internal(b3, Angle(1, 2));
  REQUIRE(uh.landed);
  REQUIRE(dh.landed);
  CHECK(std::abs(uh.point.plane() - cplx(0, SQ32)) < 1e-4);
  CHECK(std::abs(dh.point.plane() - cplx(0, -SQ32)) < 1e-4);
}

TEST_CASE("newton internal rays and copy rays") {
  cplx lam(-0.2, 0.7);
  Map n = Map::newton(lam);
  RayEngine rays(n);
  auto roots = n.newton_roots();
  int b1 = rays.basin_index(roots[0]);
  int b3 = rays.basin_index(roots[2]);
  // pullback relation in a root basin
  Angle t(3, 11);
  for (double s : {2.0, 30.0}) {
    SpherePoint p = rays.internal_point(b3, t, s + rays.subdiv());
    CHECK(chordal(n(p), rays.internal_point(b3, t.times(2), s)) < 1e-8);
  }
  // fixed rays land on the common boundary point at infinity: every root
  // basin is unbounded and its zero ray converges there
  Landing l1 = rays.trace_internal(b1, Angle(0, 1));
  REQUIRE(l1.landed);
  CHECK(chordal(l1.point, SpherePoint::infinity()) < 1e-3);
  // copy rays: the co-preimage component of B3 is centered at -1/2
  cplx w3 = n.newton_copreimage(roots[2]);
  CHECK(std::abs(w3 - cplx(-0.5, 0)) < 1e-9);
  for (double s : {0.0, 7.0, 26.0}) {
    SpherePoint p = rays.copy_point(b3, w3, t, s);
    CHECK(chordal(n(p), rays.internal_point(b3, t, s)) < 1e-8);
  }
  Landing lc = rays.trace_copy(b3, w3, Angle(0, 1));
  Landing li = rays.trace_internal(b3, Angle(0, 1));
  REQUIRE(lc.landed);
  REQUIRE(li.landed);
  CHECK(chordal(n(lc.point), li.point) < 1e-5);
}

TEST_CASE("arc sampling respects the gap bound") {
  RayEngine rays(Map::cubic_sym());
  auto arc = rays.external_arc(Angle(1, 3), 120, 1e-3);
  REQUIRE(arc.size() > 120);
  for (size_t i = 0; i + 1 < arc.size(); ++i)
    CHECK(chordal(arc[i], arc[i + 1]) < 2e-3);
}

TEST_CASE("basin classification") {
  Map f = Map::cubic_sym();
  CHECK(classify_basin(f, SpherePoint(cplx(0.05, 0.75))) == 0);
  CHECK(classify_basin(f, SpherePoint(cplx(-0.03, -0.6))) == 1);
  CHECK(classify_basin(f, SpherePoint(cplx(2.0, 0.0))) == -1);
  Map n = Map::newton(cplx(-0.2, 0.7));
  auto r = n.newton_roots();
  for (int i = 0; i < 3; ++i) {
    CHECK(classify_basin(n, SpherePoint(r[i] + cplx(0.01, 0.01))) == i);
  }
}
