#include <doctest.h>

#include <random>

#include "nmating/maps.hpp"

using namespace nmating;

static constexpr double EPS = 1e-12;

TEST_CASE("cubic family fixed points and critical orbit") {
  cplx a(0.3, 0.4);
  Map f = Map::cubic(a);
  CHECK(std::abs(f(cplx(0, 0))) < EPS);
  CHECK(std::abs(f.derivative(cplx(0, 0))) < EPS);
  CHECK(std::abs(f.derivative(-a)) < EPS);
  // critical value of the free critical point -a is a^3/2
  CHECK(std::abs(f(-a) - a * a * a / 2.0) < EPS);
  // the second preimage component of the fixed basin is centered at -3a/2
  CHECK(std::abs(f(-1.5 * a)) < 1e-10);
}

TEST_CASE("symmetric cubic: superattracting pair and repelling fixed point") {
  Map f = Map::cubic_sym();
  double c = 1.0 / std::sqrt(2.0);
  cplx up(0, c), down(0, -c);
  CHECK(std::abs(f(up) - up) < EPS);
  CHECK(std::abs(f(down) - down) < EPS);
  CHECK(std::abs(f.derivative(up)) < EPS);
  CHECK(std::abs(f.derivative(down)) < EPS);
  CHECK(std::abs(f(cplx(0, 0))) < EPS);
  CHECK(std::abs(f.derivative(cplx(0, 0)) - 1.5) < EPS);
  // finite preimages of the fixed point 0: +-i sqrt(3/2)
  double s = std::sqrt(1.5);
  CHECK(std::abs(f(cplx(0, s))) < EPS);
  CHECK(std::abs(f(cplx(0, -s))) < EPS);
}

TEST_CASE("newton coefficients at pinned parameters") {
  {
    Map n = Map::newton(cplx(0.25, 0));
    CHECK(std::abs(n.phat() - cplx(-13.0 / 16.0, 0)) < EPS);
    CHECK(std::abs(n.qhat() - cplx(-3.0 / 16.0, 0)) < EPS);
  }
  {
    Map n = Map::newton(cplx(0, 1));
    CHECK(std::abs(n.phat() - cplx(0.25, 0)) < EPS);
    CHECK(std::abs(n.qhat() - cplx(-1.25, 0)) < EPS);
  }
}

TEST_CASE("newton roots are superattracting fixed, poles map to infinity") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-0.8, 0.8);
  for (int trial = 0; trial < 20; ++trial) {
    cplx lam(u(rng), u(rng));
    if (std::abs(lam) < 0.05) continue;
    Map n = Map::newton(lam);
    for (cplx r : n.newton_roots()) {
      CHECK(std::abs(n(r) - r) < 1e-9);
      CHECK(std::abs(n.derivative(r)) < 1e-7);
      // the simple co-preimage of each root is exactly -r/2
      cplx co = n.newton_copreimage(r);
      CHECK(std::abs(co + r / 2.0) < 1e-8);
      CHECK(std::abs(n(co) - r) < 1e-8);
    }
    for (cplx p : n.poles()) {
      CHECK(std::abs(3.0 * p * p + n.phat()) < 1e-10);
      SpherePoint img = n(SpherePoint::from_plane(p));
      CHECK(chordal(img, SpherePoint::infinity()) < 1e-6);
    }
    // infinity is repelling fixed with multiplier 3/2 in the w chart
    CHECK(std::abs(n.inf_multiplier() - cplx(1.5, 0)) < EPS);
    double h = 1e-7;
    CHECK(std::abs(n.in_inf_chart(cplx(h, 0)) / h - 1.5) < 1e-5);
  }
}

TEST_CASE("preimages invert the map in both charts") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  Map maps[] = {Map::cubic(cplx(0.7, -0.2)), Map::cubic_sym(),
                Map::newton(cplx(-0.2, 0.7))};
  for (const Map &f : maps) {
    for (int trial = 0; trial < 30; ++trial) {
      cplx y(u(rng), u(rng));
      auto pre = f.preimages(y);
      REQUIRE(pre.size() == 3);
      for (cplx z : pre) CHECK(std::abs(f(z) - y) < 1e-7);
    }
    // sphere-chart preimages of a huge value
    SpherePoint big(cplx(1e-8, 2e-8), true);
    for (const auto &z : f.preimages(big)) {
      SpherePoint img = f(z);
      CHECK(chordal(img, big) < 1e-6);
    }
  }
}

TEST_CASE("sphere evaluation agrees with plane evaluation near the cut") {
  Map maps[] = {Map::cubic(cplx(0.7, -0.2)), Map::cubic_sym(),
                Map::newton(cplx(-0.2, 0.7))};
  for (const Map &f : maps) {
    for (double r : {3.0, 3.9, 4.1, 6.0, 20.0}) {
      for (int k = 0; k < 8; ++k) {
        cplx z = std::polar(r, 0.3 + k * 0.7854);
        SpherePoint sp = f(SpherePoint::from_plane(z));
        CHECK(chordal(sp, SpherePoint::from_plane(f(z))) < 1e-9);
      }
    }
  }
}
