#include <cmath>
#include <set>
#include <string>

#include "doctest.h"
#include "nmating/angles.hpp"
#include "nmating/puzzle.hpp"

using namespace nmating;

namespace {

// superattracting parameters of the period-2 satellite copies (roots of
// a^8+3a^6+8 = 0 in the fundamental quadrant resp. of the lambda^2 cubic
// 64u^3+16u^2+172u+19 = 0 in the closed left half-domain)
const cplx kCubicCenter(1.001739727069808, -0.519355901344767);
const cplx kNewtonCenter(0.0, 0.333321287241975);

InvariantGraph &sym_g() {
  static InvariantGraph g = InvariantGraph::sym_graph();
  return g;
}
InvariantGraph &cubic_g() {
  static InvariantGraph g = InvariantGraph::cubic_graph(kCubicCenter,
                                                        Angle(1, 3));
  return g;
}
InvariantGraph &newton_g() {
  static InvariantGraph g = InvariantGraph::newton_graph(kNewtonCenter,
                                                         Angle(1, 3));
  return g;
}

const GraphVertex &vertex_named(const InvariantGraph &g,
                                const std::string &name) {
  for (const auto &v : g.vertices())
    if (v.name == name) return v;
  REQUIRE_MESSAGE(false, "missing vertex " << name);
  return g.vertices().front();
}

std::string joined(const std::vector<uint8_t> &w) {
  std::string s;
  for (auto d : w) s.push_back(char('0' + d));
  return s;
}

std::set<std::string> word_set(const std::vector<std::vector<uint8_t>> &ws) {
  std::set<std::string> out;
  for (const auto &w : ws) out.insert(joined(w));
  return out;
}

std::vector<uint8_t> rep(std::initializer_list<int> head, int tail, size_t n) {
  std::vector<uint8_t> w;
  for (int d : head) w.push_back(uint8_t(d));
  while (w.size() < n) w.push_back(uint8_t(tail));
  return w;
}

} // namespace

TEST_CASE("winding number distinguishes inside from outside") {
  std::vector<SpherePoint> circle;
  for (int i = 0; i < 64; ++i)
    circle.push_back(SpherePoint(std::polar(1.0, 2 * M_PI * i / 64.0)));
  SpherePoint ex(cplx(2.5, 2.5));
  CHECK(std::abs(winding_number(circle, SpherePoint(cplx(0.2, -0.1)), ex)) ==
        doctest::Approx(1).epsilon(1e-6));
  CHECK(std::abs(winding_number(circle, SpherePoint(cplx(3, 0)), ex)) ==
        doctest::Approx(0).epsilon(1e-6));
  CHECK(std::abs(winding_number(circle, SpherePoint::infinity(), ex)) ==
        doctest::Approx(0).epsilon(1e-6));
}

TEST_CASE("odd cubic graph: census, landings, faces") {
  auto &g = sym_g();
  CHECK(g.vertices().size() == 6);
  CHECK(g.arcs().size() == 7);
  CHECK(g.faces().size() == 3);
  for (int i = 0; i < 3; ++i) CHECK(g.faces()[i].label == i);

  double rt = std::sqrt(1.5);
  CHECK(chordal(vertex_named(g, "p").pos, SpherePoint(cplx(0, 0))) < 1e-9);
  CHECK(chordal(vertex_named(g, "p'").pos, SpherePoint(cplx(0, rt))) < 2e-6);
  CHECK(chordal(vertex_named(g, "p''").pos, SpherePoint(cplx(0, -rt))) < 2e-6);

  // independent landing oracle: the 1/4 ray lands on the invariant axis
  // cycle {iy, -iy} with y^2 = 5/2
  Landing l = g.rays().trace_external(Angle(1, 4));
  CHECK(l.landed);
  CHECK(chordal(l.point, SpherePoint(cplx(0, std::sqrt(2.5)))) < 2e-6);

  // sector faces agree with the first digit of the negated-angle coding
  CHECK(g.face_of(SpherePoint(cplx(0.4, 0.35))) == 2);
  CHECK(g.face_of(SpherePoint(cplx(-0.6, 0.0))) == 1);
  CHECK(g.face_of(SpherePoint(cplx(0.4, -0.35))) == 0);
  CHECK(g.face_of(SpherePoint(cplx(0, 0.3))) == -1);  // on the axis arc
  CHECK(g.face_of(SpherePoint::infinity()) == -1);    // vertex
}

TEST_CASE("odd cubic co-landing pairs and companion classes") {
  auto &g = sym_g();
  // biaccessible points are the iterated preimages of the repelling fixed
  // point; each carries one triadic and one non-triadic access
  const std::pair<Angle, Angle> pairs[] = {
      {Angle(0, 1), Angle(1, 2)},  // fixed point
      {Angle(1, 3), Angle(1, 6)},  // upper preimage
      {Angle(2, 3), Angle(5, 6)},  // lower preimage
      {Angle(1, 9), Angle(1, 18)}, {Angle(4, 9), Angle(7, 18)},
      {Angle(7, 9), Angle(13, 18)}};
  for (const auto &[s, t] : pairs) {
    Landing a = g.rays().trace_external(s);
    Landing b = g.rays().trace_external(t);
    REQUIRE(a.landed);
    REQUIRE(b.landed);
    CHECK_MESSAGE(chordal(a.point, b.point) < 2e-5,
                  s.str() << " and " << t.str() << " should co-land");
    // symbolic side: the companion of the glued class of -s has angle -t
    auto cls = itinerary_of_angle(s.negated());
    auto comp = companion_class(cls);
    REQUIRE(comp.has_value());
    CHECK(theta(comp->words[0]) == t.negated());
  }
  // non-paired angles land apart
  Landing a = g.rays().trace_external(Angle(0, 1));
  Landing b = g.rays().trace_external(Angle(1, 3));
  CHECK(chordal(a.point, b.point) > 1e-2);
}

TEST_CASE("odd cubic itineraries follow the negated-angle coding") {
  auto &g = sym_g();
  for (const Angle &s : {Angle(5, 7), Angle(1, 5), Angle(3, 11)}) {
    Landing l = g.rays().trace_external(s);
    REQUIRE(l.landed);
    auto words = g.itinerary(l.point, 9);
    REQUIRE(words.size() == 1);
    auto expect = itinerary_of_angle(s.negated()).words[0].prefix(9);
    CHECK_MESSAGE(words[0] == expect, s.str() << ": got " << joined(words[0])
                                              << " want " << joined(expect));
  }

  // marked fixed point p: sector words are the three constant words
  auto wp = word_set(g.itinerary(SpherePoint(cplx(0, 0)), 8));
  CHECK(wp == std::set<std::string>{"00000000", "11111111", "22222222"});

  // p' carries the classes [21^inf] and [20^inf] = [12^inf]
  auto wpp = word_set(g.itinerary(vertex_named(g, "p'").pos, 8));
  std::set<std::string> allowed{"21111111", "20000000", "12222222"};
  bool upper_ok = true;
  for (const auto &w : wpp) upper_ok = upper_ok && allowed.count(w);
  CHECK(upper_ok);
  CHECK(wpp.count("21111111") == 1);
  CHECK((wpp.count("20000000") || wpp.count("12222222")));

  // p'' carries [01^inf] and [10^inf] = [02^inf]
  auto wq = word_set(g.itinerary(vertex_named(g, "p''").pos, 8));
  std::set<std::string> allowed2{"01111111", "10000000", "02222222"};
  bool lower_ok = true;
  for (const auto &w : wq) lower_ok = lower_ok && allowed2.count(w);
  CHECK(lower_ok);
  CHECK(wq.count("01111111") == 1);
  CHECK((wq.count("10000000") || wq.count("02222222")));
}

TEST_CASE("odd cubic nests shrink onto the coded points") {
  auto &g = sym_g();
  // the word 1^n pins the repelling fixed point; its multiplier 3/2 makes
  // this the slowest-shrinking nest of the family
  auto w1 = rep({}, 1, 12);
  double d1 = g.nest_diameter(w1);
  CHECK(d1 < 5e-2);
  CHECK(chordal(g.nest_point(w1), SpherePoint(cplx(0, 0))) < d1 + 1e-9);

  // glued words share their nest limit: 10^inf and 02^inf both pin p''
  SpherePoint pq = vertex_named(g, "p''").pos;
  auto wa = rep({1}, 0, 12);
  auto wb = rep({0}, 2, 12);
  auto wc = rep({0}, 1, 12);
  CHECK(chordal(g.nest_point(wa), pq) < g.nest_diameter(wa) + 2e-5);
  CHECK(chordal(g.nest_point(wb), pq) < g.nest_diameter(wb) + 2e-5);
  CHECK(chordal(g.nest_point(wc), pq) < g.nest_diameter(wc) + 2e-5);

  // diameters decrease with depth; a generic word contracts at the full
  // degree-3 expansion rate
  double d4 = g.nest_diameter(rep({1}, 0, 4));
  double d8 = g.nest_diameter(rep({1}, 0, 8));
  double d12 = g.nest_diameter(rep({1}, 0, 12));
  CHECK(d8 < d4);
  CHECK(d12 < d8);
  std::vector<uint8_t> generic;
  for (int i = 0; i < 12; ++i) generic.push_back(uint8_t((2 - i % 3)));
  CHECK(g.nest_diameter(generic) < 1e-3);
}

TEST_CASE("cubic renormalization graph at the period-2 center") {
  auto &g = cubic_g();
  CHECK(g.vertices().size() == 9);
  CHECK(g.arcs().size() == 10);
  CHECK(g.faces().size() == 3);
  CHECK(g.blobs().size() == 2);

  // co-landing pairs on the small filled copies
  const std::pair<Angle, Angle> pairs[] = {{Angle(1, 4), Angle(5, 8)},
                                           {Angle(7, 24), Angle(7, 12)},
                                           {Angle(3, 4), Angle(7, 8)}};
  for (const auto &[s, t] : pairs) {
    Landing a = g.rays().trace_external(s);
    Landing b = g.rays().trace_external(t);
    REQUIRE(a.landed);
    REQUIRE(b.landed);
    CHECK_MESSAGE(chordal(a.point, b.point) < 2e-5,
                  s.str() << " and " << t.str() << " should co-land");
  }
  Landing l14 = g.rays().trace_external(Angle(1, 4));
  CHECK(chordal(l14.point, vertex_named(g, "delta0").pos) < 2e-5);
  Landing l34 = g.rays().trace_external(Angle(3, 4));
  CHECK(chordal(l34.point, vertex_named(g, "delta1").pos) < 2e-5);

  // critical orbit sits inside the copies
  cplx a = kCubicCenter;
  CHECK(g.in_blob(SpherePoint(-a)));
  CHECK(g.in_blob(SpherePoint(a * a * a / 2.0)));
  CHECK_FALSE(g.in_blob(SpherePoint(cplx(2, 2))));
  CHECK(g.face_of(SpherePoint(-a)) == -1);

  // the forward copy hangs inside face 2
  auto poly = g.face_polygon(2);
  double w = winding_number(poly, SpherePoint(g.blobs()[1].disk_center),
                            g.faces()[0].probe);
  CHECK(std::abs(w) > 0.5);
}

TEST_CASE("cubic itineraries and nests at the period-2 center") {
  auto &g = cubic_g();
  Landing l = g.rays().trace_external(Angle(5, 7));
  REQUIRE(l.landed);
  auto words = g.itinerary(l.point, 9);
  REQUIRE(words.size() == 1);
  CHECK(words[0] == itinerary_of_angle(Angle(5, 7)).words[0].prefix(9));

  // the copy root delta(1/3) carries the two period-2 words
  auto wr = word_set(g.itinerary(vertex_named(g, "delta0").pos, 8));
  CHECK(wr == std::set<std::string>{"02020202", "12121212"});

  // nests of those words both converge to the copy root
  SpherePoint root = vertex_named(g, "delta0").pos;
  std::vector<uint8_t> wa, wb;
  for (int i = 0; i < 12; ++i) {
    wa.push_back(i % 2 ? 2 : 0);
    wb.push_back(i % 2 ? 2 : 1);
  }
  CHECK(chordal(g.nest_point(wa), root) < g.nest_diameter(wa) + 2e-5);
  CHECK(chordal(g.nest_point(wb), root) < g.nest_diameter(wb) + 2e-5);
  CHECK(g.nest_diameter(wa) < 5e-2);
  std::vector<uint8_t> generic;
  for (int i = 0; i < 12; ++i) generic.push_back(uint8_t((2 - i % 3)));
  CHECK(g.nest_diameter(generic) < 1e-3);
}

TEST_CASE("newton renormalization graph at the period-2 center") {
  auto &g = newton_g();
  CHECK(g.vertices().size() == 10);
  CHECK(g.arcs().size() == 11);
  CHECK(g.faces().size() == 3);
  CHECK(g.blobs().size() == 2);

  // the 1/2-rays of basins 1 and 2 land on one pole, basin 3's on the other
  auto poles = g.map().poles();
  SpherePoint q = vertex_named(g, "q").pos;
  SpherePoint qq = vertex_named(g, "q'").pos;
  CHECK(std::min(chordal(q, SpherePoint(poles[0])),
                 chordal(q, SpherePoint(poles[1]))) < 1e-5);
  CHECK(std::min(chordal(qq, SpherePoint(poles[0])),
                 chordal(qq, SpherePoint(poles[1]))) < 1e-5);
  CHECK(chordal(q, qq) > 1e-3);

  // sector words at the fixed point at infinity: both glued classes
  auto wi = word_set(g.itinerary(SpherePoint::infinity(), 8));
  CHECK(wi == std::set<std::string>{"00000000", "11111111", "22222222"});

  // q' carries the glued class [02^inf] = [10^inf]; the further limit word
  // 01^inf lives in a subsector and need not appear as a sector sample
  auto wq = word_set(g.itinerary(qq, 8));
  std::set<std::string> allowed{"01111111", "02222222", "10000000"};
  bool ok = true;
  for (const auto &w : wq) ok = ok && allowed.count(w);
  CHECK(ok);
  CHECK((wq.count("02222222") || wq.count("10000000")));

  // q carries [21^inf] and [20^inf] = [12^inf]
  auto wq2 = word_set(g.itinerary(q, 8));
  std::set<std::string> allowed2{"21111111", "20000000", "12222222"};
  ok = true;
  for (const auto &w : wq2) ok = ok && allowed2.count(w);
  CHECK(ok);
  CHECK(wq2.count("21111111") == 1);

  // nests pin the marked points across glued words
  auto w1 = rep({}, 1, 11);
  CHECK(chordal(g.nest_point(w1), SpherePoint::infinity()) <
        g.nest_diameter(w1) + 2e-5);
  auto wa = rep({1}, 0, 11);
  auto wb = rep({0}, 2, 11);
  auto wc = rep({0}, 1, 11);
  CHECK(chordal(g.nest_point(wa), qq) < g.nest_diameter(wa) + 2e-5);
  CHECK(chordal(g.nest_point(wb), qq) < g.nest_diameter(wb) + 2e-5);
  CHECK(chordal(g.nest_point(wc), qq) < g.nest_diameter(wc) + 2e-5);
  auto wd = rep({2}, 1, 11);
  CHECK(chordal(g.nest_point(wd), q) < g.nest_diameter(wd) + 2e-5);

  // face 2 avoids the closure of the third basin
  int b3 = g.rays().basin_index(g.map().newton_roots()[2]);
  for (int j = 0; j < 8; ++j) {
    SpherePoint z = g.rays().internal_point(b3, Angle(2 * j + 1, 16), 27);
    CHECK(g.face_of(z) != 2);
  }
}

TEST_CASE("graphs are forward invariant") {
  // engine identity: the map sends the ray point at level s to the tripled
  // (external) resp. doubled (internal) angle at level s - J
  auto &gs = sym_g();
  int J = gs.rays().subdiv();
  for (const Angle &t : {Angle(1, 4), Angle(5, 7)}) {
    SpherePoint z = gs.rays().external_point(t, 2.0 * J);
    SpherePoint w = gs.rays().external_point(t.times(3), 1.0 * J);
    CHECK(chordal(gs.map()(z), w) < 1e-7);
  }

  // polyline containment at sampled arc points
  for (InvariantGraph *g : {&sym_g(), &cubic_g(), &newton_g()}) {
    for (const auto &arc : g->arcs()) {
      if (arc.name == "spine") continue; // chord stand-in, checked via blobs
      const auto &pts = arc.points;
      for (size_t frac = 1; frac <= 3; ++frac) {
        SpherePoint z = pts[frac * (pts.size() - 1) / 4];
        SpherePoint fz = g->map()(z);
        double d = g->dist_to_graph(fz);
        CHECK_MESSAGE(d < 4e-3, arc.name << ": image leaves the graph by "
                                         << d);
      }
    }
  }
}

TEST_CASE("face-constrained pullbacks join faces to their preimages") {
  for (InvariantGraph *g : {&sym_g(), &newton_g()}) {
    for (int lab = 0; lab < 3; ++lab) {
      SpherePoint y = g->face_samples(lab)[0];
      for (int target = 0; target < 3; ++target) {
        SpherePoint p = g->pullback_into_face(y, target);
        CHECK(g->face_of(p) == target);
        CHECK(chordal(g->map()(p), y) < 1e-7);
      }
    }
  }
}
