#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "json.hpp"
#include "nmating/params.hpp"

using namespace nmating;

namespace {

// landmark parameters of the period-2 copy (angle 2/3), frozen from
// converged runs; the centers are re-verified against the defining
// equations below, the boundary values are r = 1 - 1e-4 proxies
const cplx A_CENTER(1.001739727069808, -0.519355901344767);
const cplx L_CENTER(0.0, 0.333321287241975);
const cplx A_CUSP(0.988119710070, -0.515077260659);
const cplx L_CUSP(-0.000816434075, 0.337991049914);
const cplx A_CENTER2(1.021067844295060, -0.526188552491139);
const cplx L_CENTER2(0.0, 0.326950828889023);

long order_of_two(long q) {
  long k = 1, w = 2 % q;
  while (w != 1) {
    w = (2 * w) % q;
    ++k;
  }
  return k;
}

double circ_dist(double x, double y) {
  double d = std::fmod(std::abs(x - y), 1.0);
  return std::min(d, 1.0 - d);
}

cplx crit_of(const Map &f) {
  return f.family() == Family::Cubic ? -f.param() : cplx(0, 0);
}

double orbit_closure(const Map &f, long period) {
  cplx z = crit_of(f);
  for (long i = 0; i < period; ++i) z = f(z);
  return std::abs(z - crit_of(f));
}

} // namespace

TEST_CASE("cusp angles are the even-over-odd fractions with their cycle "
          "length") {
  auto list = cusp_angles(31);
  // independent enumeration: reduced n/q with q odd and n even
  std::vector<std::pair<Angle, long>> brute;
  for (long q = 3; q <= 31; q += 2)
    for (long n = 2; n < q; n += 2)
      if (std::gcd(n, q) == 1) brute.push_back({Angle(n, q), order_of_two(q)});
  std::sort(brute.begin(), brute.end(),
            [](const auto &a, const auto &b) { return a.first < b.first; });
  REQUIRE(list.size() == brute.size());
  for (size_t i = 0; i < list.size(); ++i) {
    CHECK(list[i].t == brute[i].first);
    CHECK(list[i].k == brute[i].second);
    // the tagged length matches the doubling period of the halved angle
    auto k = doubling_period(list[i].t.half());
    REQUIRE(k.has_value());
    CHECK(*k == list[i].k);
    CHECK(list[i].k >= 2);
  }
  // smallest example: only 2/3 has denominator 3
  auto small = cusp_angles(3);
  REQUIRE(small.size() == 1);
  CHECK(small[0].t == Angle(2, 3));
  CHECK(small[0].k == 2);
}

TEST_CASE("boundary parametrization reaches the frozen landmark values") {
  ParamPoint ac = boundary_param(Family::Cubic, Angle(2, 3));
  CHECK(ac.region == Region::CopyCusp);
  CHECK(ac.k == 2);
  CHECK(std::abs(ac.value - A_CUSP) < 1e-6);
  CHECK(ac.err < 1e-3);

  ParamPoint lc = boundary_param(Family::Newton, Angle(2, 3));
  CHECK(lc.region == Region::CopyCusp);
  CHECK(lc.k == 2);
  CHECK(std::abs(lc.value - L_CUSP) < 1e-6);

  // t = 1/2 halves to a preperiodic angle: boundary but not a cusp
  ParamPoint ah = boundary_param(Family::Cubic, Angle(1, 2));
  CHECK(ah.region == Region::Boundary);
  CHECK(ah.value.real() > 0.0);
  CHECK(ah.value.imag() < 0.0);
  CHECK(std::abs(ah.value - cplx(0.745034053, -0.734915867)) < 1e-6);

  CHECK_THROWS_AS(boundary_param(Family::Cubic, Angle(0, 1)),
                  std::domain_error);
}

TEST_CASE("copy centers satisfy the superattracting equation") {
  ParamPoint a1 = center_in_copy(Family::Cubic, Angle(2, 3), 1);
  CHECK(a1.region == Region::CopyCenter);
  CHECK(a1.k == 2);
  CHECK(a1.m == 1);
  CHECK(std::abs(a1.value - A_CENTER) < 1e-9);
  CHECK(a1.err < 1e-12);
  CHECK(orbit_closure(Map::cubic(a1.value), 2) < 1e-10);

  ParamPoint l1 = center_in_copy(Family::Newton, Angle(2, 3), 1);
  CHECK(std::abs(l1.value - L_CENTER) < 1e-9);
  CHECK(std::abs(l1.value.real()) < 1e-10);
  CHECK(orbit_closure(Map::newton(l1.value), 2) < 1e-10);

  // renormalized period 2 inside the same copy: total period 4, exact
  ParamPoint a2 = center_in_copy(Family::Cubic, Angle(2, 3), 2);
  CHECK(a2.k == 2);
  CHECK(a2.m == 2);
  CHECK(std::abs(a2.value - A_CENTER2) < 1e-9);
  CHECK(orbit_closure(Map::cubic(a2.value), 4) < 1e-10);
  CHECK(orbit_closure(Map::cubic(a2.value), 2) > 1e-3);

  ParamPoint l2 = center_in_copy(Family::Newton, Angle(2, 3), 2);
  CHECK(std::abs(l2.value - L_CENTER2) < 1e-9);
  CHECK(orbit_closure(Map::newton(l2.value), 4) < 1e-10);
  CHECK(orbit_closure(Map::newton(l2.value), 2) > 1e-3);
}

TEST_CASE("critical value position matches the quartic local laws") {
  cplx a = std::polar(0.1, -M_PI / 4.0);
  cplx wa = critical_value_position(Map::cubic(a));
  CHECK(std::abs(wa / (0.75 * a * a * a * a) - 1.0) < 5e-3);

  cplx eps = std::polar(0.02, M_PI / 4.0);
  cplx wl = critical_value_position(Map::newton(cplx(-0.5, 0) + eps));
  CHECK(std::abs(wl / (3.0 * eps * eps * eps * eps) - 1.0) < 0.06);

  // at the family centers the free critical value sits on the fixed center
  CHECK(std::abs(critical_value_position(Map::cubic(cplx(0, 0)))) == 0.0);
  CHECK(std::abs(critical_value_position(Map::newton(cplx(-0.5, 0)))) == 0.0);
}

TEST_CASE("critical value position inverts the boundary parametrization") {
  for (Family fam : {Family::Cubic, Family::Newton}) {
    for (Angle t : {Angle(2, 3), Angle(2, 7)}) {
      ParamPoint p = boundary_param(fam, t);
      cplx w = critical_value_position(p);
      CHECK(std::abs(std::abs(w) - (1.0 - 1e-4)) < 1e-8);
      CHECK(circ_dist(std::arg(w) / (2.0 * M_PI), t.to_double()) < 1e-5);
    }
  }
}

TEST_CASE("correspondence carries the cubic skeleton onto the Newton one") {
  ParamPoint cusp = boundary_param(Family::Cubic, Angle(2, 3));
  ParamPoint ncusp = correspondence(cusp);
  CHECK(ncusp.family == Family::Newton);
  CHECK(ncusp.region == Region::CopyCusp);
  CHECK(ncusp.k == 2);
  CHECK(std::abs(ncusp.value - L_CUSP) < 1e-6);

  ParamPoint center = center_in_copy(Family::Cubic, Angle(2, 3), 1);
  ParamPoint ncenter = correspondence(center);
  CHECK(ncenter.region == Region::CopyCenter);
  CHECK(ncenter.k == 2);
  CHECK(ncenter.m == 1);
  CHECK(std::abs(ncenter.value - L_CENTER) < 1e-9);

  ParamPoint half = boundary_param(Family::Cubic, Angle(1, 2));
  ParamPoint nhalf = correspondence(half);
  CHECK(nhalf.region == Region::Boundary);
  CHECK(std::abs(nhalf.value - boundary_param(Family::Newton,
                                              Angle(1, 2)).value) < 1e-9);

  // interior points map by matching the renormalized cycle multiplier
  ParamPoint inside;
  inside.family = Family::Cubic;
  inside.value = A_CENTER + 0.3 * (A_CUSP - A_CENTER);
  inside.region = Region::CopyInterior;
  inside.t = Angle(2, 3);
  ParamPoint ninside = correspondence(inside);
  CHECK(ninside.approximate);
  CHECK(ninside.m == 1);
  CHECK(ninside.err < 1e-6);
  CHECK(std::abs(ninside.value - L_CENTER) < 0.05);
}

TEST_CASE("correspondence rejects inputs off the skeleton") {
  auto reject = [](cplx a, Region reg) {
    ParamPoint p;
    p.family = Family::Cubic;
    p.value = a;
    p.region = reg;
    p.t = Angle(2, 3);
    CHECK_THROWS_AS(correspondence(p), std::domain_error);
  };
  // the excluded copies at the slit endpoint, in all symmetric positions
  reject(cplx(0, 4.0 / 3.0), Region::CopyCusp);
  reject(cplx(0, -4.0 / 3.0), Region::CopyCusp);
  reject(cplx(0, std::sqrt(2.0)), Region::CopyCenter);
  reject(cplx(0, -std::sqrt(2.0)), Region::CopyCenter);
  // arbitrary points without a skeleton tag
  reject(cplx(3.0, 0.5), Region::Other);
  // the correspondence is defined on the cubic plane only
  ParamPoint q;
  q.family = Family::Newton;
  q.value = L_CENTER;
  q.region = Region::CopyCenter;
  q.t = Angle(2, 3);
  q.m = 1;
  CHECK_THROWS_AS(correspondence(q), std::domain_error);
}

TEST_CASE("correspondence table renders consistently in both formats") {
  auto rows = correspondence_table(3, 1);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].t == Angle(2, 3));
  CHECK(rows[0].m == 0); // cusp row
  CHECK(rows[1].m == 1);
  CHECK(std::abs(rows[0].cubic_value - A_CUSP) < 1e-6);
  CHECK(std::abs(rows[1].newton_value - L_CENTER) < 1e-9);

  std::string csv = correspondence_csv(rows);
  CHECK(csv.rfind("t,k,m,re_a,im_a,re_lambda,im_lambda\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  CHECK(csv.find("2/3") != std::string::npos);

  auto arr = nlohmann::json::parse(correspondence_json(rows));
  REQUIRE(arr.is_array());
  REQUIRE(arr.size() == 2);
  CHECK(arr[0]["t"] == "2/3");
  CHECK(arr[0]["k"] == 2);
  CHECK(arr[0]["m"] == 0);
  CHECK(arr[1]["lambda"][0].get<double>() ==
        doctest::Approx(rows[1].newton_value.real()).epsilon(1e-12));
  CHECK(arr[1]["lambda"][1].get<double>() ==
        doctest::Approx(rows[1].newton_value.imag()).epsilon(1e-12));
}
