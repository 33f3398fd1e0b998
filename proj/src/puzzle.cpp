#include "nmating/puzzle.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace nmating {

namespace {

constexpr double kOnGraph = 1e-6;    // on-graph reporting tolerance
constexpr double kDecimate = 1.2e-3; // polygon decimation spacing
constexpr double kSnapTol = 2e-4;    // arc endpoint / vertex agreement

cplx norm1(cplx d) {
  double m = std::abs(d);
  if (!(m > 0) || !std::isfinite(m)) return cplx(1, 0);
  return d / m;
}

// value of z in the chart w = 1/(zeta - e); infinity maps to 0
cplx chart_val(const SpherePoint &s, cplx e) {
  if (s.at_inf_chart) return s.v / (1.0 - s.v * e);
  return 1.0 / (s.v - e);
}

SpherePoint lerp_sp(const SpherePoint &a, const SpherePoint &b, double t) {
  if (a.at_inf_chart && b.at_inf_chart)
    return SpherePoint(a.v + (b.v - a.v) * t, true);
  if (a.is_infinity() || b.is_infinity()) {
    cplx wa = a.at_inf_chart ? a.v : 1.0 / a.v;
    cplx wb = b.at_inf_chart ? b.v : 1.0 / b.v;
    cplx w = wa + (wb - wa) * t;
    if (w == cplx(0, 0)) return SpherePoint::infinity();
    return SpherePoint::from_plane(1.0 / w);
  }
  return SpherePoint::from_plane(a.plane() + (b.plane() - a.plane()) * t);
}

double seg_dist(const SpherePoint &z, const SpherePoint &a,
                const SpherePoint &b) {
  // golden-section over the segment parameter
  double lo = 0, hi = 1;
  const double g = 0.3819660112501051;
  double m1 = lo + g * (hi - lo), m2 = hi - g * (hi - lo);
  double f1 = chordal(z, lerp_sp(a, b, m1));
  double f2 = chordal(z, lerp_sp(a, b, m2));
  for (int i = 0; i < 20; ++i) {
    if (f1 < f2) {
      hi = m2;
      m2 = m1;
      f2 = f1;
      m1 = lo + g * (hi - lo);
      f1 = chordal(z, lerp_sp(a, b, m1));
    } else {
      lo = m1;
      m1 = m2;
      f1 = f2;
      m2 = hi - g * (hi - lo);
      f2 = chordal(z, lerp_sp(a, b, m2));
    }
  }
  return std::min({f1, f2, chordal(z, a), chordal(z, b)});
}

struct NearestSeg {
  double dist = 1e9;
  int arc = -1;
  size_t seg = 0;
};

NearestSeg nearest_segment(const std::vector<GraphArc> &arcs,
                           const SpherePoint &z) {
  NearestSeg best;
  // endpoint scan with a segment-length slack, then refine candidates
  for (size_t ai = 0; ai < arcs.size(); ++ai) {
    const auto &pts = arcs[ai].points;
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
      double de = std::min(chordal(z, pts[i]), chordal(z, pts[i + 1]));
      double len = chordal(pts[i], pts[i + 1]);
      if (de - len >= best.dist) continue;
      double d = len < 1e-12 ? de : seg_dist(z, pts[i], pts[i + 1]);
      if (d < best.dist) best = {d, int(ai), i};
    }
  }
  return best;
}

// direction of departure of a polyline from the endpoint `vertex_end`
// (true: from front), expressed in the local chart of that endpoint
cplx depart_dir(const GraphArc &arc, bool from_front) {
  const auto &pts = arc.points;
  SpherePoint at = from_front ? pts.front() : pts.back();
  for (size_t k = 1; k < pts.size(); ++k) {
    SpherePoint nxt = from_front ? pts[k] : pts[pts.size() - 1 - k];
    cplx d;
    if (at.at_inf_chart) {
      cplx wa = at.v;
      cplx wb = nxt.at_inf_chart ? nxt.v : 1.0 / nxt.plane();
      d = wb - wa;
    } else {
      if (nxt.at_inf_chart && std::abs(nxt.v) < 1e-7) continue; // skip jump
      d = nxt.plane() - at.plane();
    }
    if (std::abs(d) > 1e-12) return norm1(d);
  }
  throw std::runtime_error("graph construction: degenerate arc " + arc.name);
}

std::vector<SpherePoint> decimate(const std::vector<SpherePoint> &pts) {
  std::vector<SpherePoint> out;
  for (size_t i = 0; i < pts.size(); ++i) {
    if (out.empty() || i + 1 == pts.size() ||
        chordal(out.back(), pts[i]) > kDecimate)
      out.push_back(pts[i]);
  }
  return out;
}

// numeric side transport: direction at z (local chart) to direction at f(z)
cplx transport_side(const Map &f, const SpherePoint &z, cplx side) {
  const double h = 1e-5;
  SpherePoint probe = z.at_inf_chart
                          ? SpherePoint(z.v + h * side, true)
                          : SpherePoint::from_plane(z.plane() + h * side);
  SpherePoint fz = f(z), fp = f(probe);
  cplx d;
  if (fz.at_inf_chart) {
    cplx wa = fz.v;
    cplx wb = fp.at_inf_chart ? fp.v : 1.0 / fp.plane();
    d = wb - wa;
  } else {
    d = fp.plane() - fz.plane();
  }
  return norm1(d);
}

std::string word_str(const std::vector<uint8_t> &w) {
  std::string s;
  for (auto d : w) s.push_back(char('0' + d));
  return s;
}

} // namespace

double winding_number(const std::vector<SpherePoint> &loop,
                      const SpherePoint &around, const SpherePoint &exclude) {
  cplx e = exclude.plane();
  cplx c = chart_val(around, e);
  double total = 0;
  cplx prev = chart_val(loop.back(), e) - c;
  for (const auto &p : loop) {
    cplx cur = chart_val(p, e) - c;
    cplx r = cur * std::conj(prev);
    total += std::atan2(r.imag(), r.real());
    prev = cur;
  }
  return total / (2 * M_PI);
}

std::vector<SpherePoint> InvariantGraph::face_polygon(int face_index) const {
  const auto &face = faces_.at(face_index);
  std::vector<SpherePoint> poly;
  for (auto [ai, fwd] : face.boundary) {
    const auto &pts = arcs_[ai].points;
    if (fwd)
      poly.insert(poly.end(), pts.begin(), pts.end());
    else
      poly.insert(poly.end(), pts.rbegin(), pts.rend());
  }
  return poly;
}

const std::vector<SpherePoint> &InvariantGraph::face_samples(int label) const {
  for (size_t i = 0; i < faces_.size(); ++i)
    if (faces_[i].label == label) return face_samples_[i];
  throw std::out_of_range("no face with label " + std::to_string(label));
}

void InvariantGraph::finalize_faces(
    const std::vector<std::pair<SpherePoint, int>> &probes) {
  // snap arc endpoints onto their vertices
  for (auto &a : arcs_) {
    if (chordal(a.points.front(), vertices_[a.v_from].pos) > kSnapTol ||
        chordal(a.points.back(), vertices_[a.v_to].pos) > kSnapTol)
      throw std::runtime_error("graph construction: arc " + a.name +
                               " does not join its stated vertices");
    a.points.front() = vertices_[a.v_from].pos;
    a.points.back() = vertices_[a.v_to].pos;
  }

  // rotation system: outgoing half-edges sorted by departure angle
  struct Half {
    int arc;
    bool fwd;
  };
  std::vector<std::vector<Half>> out(vertices_.size());
  for (size_t ai = 0; ai < arcs_.size(); ++ai) {
    out[arcs_[ai].v_from].push_back({int(ai), true});
    out[arcs_[ai].v_to].push_back({int(ai), false});
  }
  std::vector<std::vector<double>> ang(vertices_.size());
  for (size_t v = 0; v < vertices_.size(); ++v) {
    for (auto &h : out[v]) {
      cplx d = depart_dir(arcs_[h.arc], h.fwd);
      ang[v].push_back(std::atan2(d.imag(), d.real()));
    }
    std::vector<size_t> idx(out[v].size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](size_t i, size_t j) { return ang[v][i] < ang[v][j]; });
    std::vector<Half> sorted;
    for (size_t i : idx) sorted.push_back(out[v][i]);
    for (size_t i = 0; i + 1 < idx.size(); ++i)
      if (ang[v][idx[i + 1]] - ang[v][idx[i]] < 1e-9)
        throw std::runtime_error(
            "graph construction: coincident arc directions at vertex " +
            vertices_[v].name);
    out[v] = sorted;
  }

  // trace complementary faces: next half-edge = rotation successor of the
  // reversal at the head vertex
  auto head = [&](const Half &h) {
    return h.fwd ? arcs_[h.arc].v_to : arcs_[h.arc].v_from;
  };
  std::set<std::pair<int, int>> visited; // (arc, fwd)
  std::vector<std::vector<std::pair<int, bool>>> walks;
  for (size_t ai = 0; ai < arcs_.size(); ++ai) {
    for (bool dir : {true, false}) {
      if (visited.count({int(ai), dir})) continue;
      std::vector<std::pair<int, bool>> walk;
      Half h{int(ai), dir};
      while (!visited.count({h.arc, h.fwd})) {
        visited.insert({h.arc, h.fwd});
        walk.push_back({h.arc, h.fwd});
        int v = head(h);
        Half rev{h.arc, !h.fwd};
        size_t pos = 0;
        for (size_t i = 0; i < out[v].size(); ++i)
          if (out[v][i].arc == rev.arc && out[v][i].fwd == rev.fwd) pos = i;
        h = out[v][(pos + 1) % out[v].size()];
      }
      walks.push_back(walk);
    }
  }

  long expected = 2 - long(vertices_.size()) + long(arcs_.size());
  if (long(walks.size()) != expected) {
    std::ostringstream os;
    os << "graph construction: face walk count " << walks.size()
       << " != Euler count " << expected;
    throw std::runtime_error(os.str());
  }

  // assemble decimated polygons and per-walk exclusion anchors
  std::vector<std::vector<SpherePoint>> polys;
  for (auto &walk : walks) {
    std::vector<SpherePoint> poly;
    for (auto [ai, fwd] : walk) {
      auto pts = decimate(arcs_[ai].points);
      if (fwd)
        poly.insert(poly.end(), pts.begin(), pts.end());
      else
        poly.insert(poly.end(), pts.rbegin(), pts.rend());
    }
    polys.push_back(poly);
  }
  std::vector<SpherePoint> excludes;
  for (size_t w = 0; w < walks.size(); ++w) {
    std::set<int> on_walk;
    for (auto [ai, fwd] : walks[w]) on_walk.insert(ai);
    SpherePoint best;
    double best_d = -1;
    for (size_t ai = 0; ai < arcs_.size(); ++ai) {
      if (on_walk.count(int(ai))) continue;
      SpherePoint mid = arcs_[ai].points[arcs_[ai].points.size() / 2];
      if (mid.is_infinity()) continue;
      double d = 1e9;
      for (const auto &p : polys[w]) d = std::min(d, chordal(mid, p));
      if (d > best_d) {
        best_d = d;
        best = mid;
      }
    }
    if (best_d < 1e-4)
      throw std::runtime_error(
          "graph construction: no exclusion anchor for a face walk");
    excludes.push_back(best);
  }

  auto contains = [&](size_t w, const SpherePoint &z) {
    return std::abs(winding_number(polys[w], z, excludes[w])) > 0.5;
  };

  // probe labeling; walks containing the closed-basin center are interior
  // to the graph and dropped
  std::vector<int> walk_label(walks.size(), -2);
  if (closed_basin_) {
    SpherePoint c(closed_center_);
    for (size_t w = 0; w < walks.size(); ++w)
      if (contains(w, c)) walk_label[w] = -1;
  }
  for (const auto &[pt, label] : probes) {
    int hit = -1;
    for (size_t w = 0; w < walks.size(); ++w) {
      if (walk_label[w] == -1) continue;
      if (contains(w, pt)) {
        if (hit >= 0)
          throw std::runtime_error(
              "graph construction: probe in two face walks");
        hit = int(w);
      }
    }
    if (hit < 0)
      throw std::runtime_error("graph construction: face probe for label " +
                               std::to_string(label) + " at " + pt.str() +
                               " not inside any face walk");
    if (walk_label[hit] != -2)
      throw std::runtime_error(
          "graph construction: two probes in one face walk");
    walk_label[hit] = label;
  }
  // a single unprobed face takes the single unused label
  {
    std::vector<size_t> open;
    std::set<int> used;
    for (size_t w = 0; w < walks.size(); ++w) {
      if (walk_label[w] == -2) open.push_back(w);
      if (walk_label[w] >= 0) used.insert(walk_label[w]);
    }
    std::vector<int> missing;
    for (int lab = 0; lab < 3; ++lab)
      if (!used.count(lab)) missing.push_back(lab);
    if (open.size() == 1 && missing.size() == 1)
      walk_label[open[0]] = missing[0];
    else if (!open.empty())
      throw std::runtime_error("graph construction: unlabeled face walk");
  }

  faces_.clear();
  face_polys_.clear();
  exclude_pts_.clear();
  for (size_t w = 0; w < walks.size(); ++w) {
    if (walk_label[w] < 0) continue;
    GraphFace f;
    f.label = walk_label[w];
    f.boundary = walks[w];
    faces_.push_back(f);
    face_polys_.push_back(polys[w]);
    exclude_pts_.push_back(excludes[w]);
  }
  std::vector<size_t> order(faces_.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t i, size_t j) {
    return faces_[i].label < faces_[j].label;
  });
  std::vector<GraphFace> ff;
  std::vector<std::vector<SpherePoint>> pp;
  std::vector<SpherePoint> ee;
  for (size_t i : order) {
    ff.push_back(faces_[i]);
    pp.push_back(face_polys_[i]);
    ee.push_back(exclude_pts_[i]);
  }
  faces_ = ff;
  face_polys_ = pp;
  exclude_pts_ = ee;
  if (faces_.size() != 3)
    throw std::runtime_error("graph construction: expected 3 labeled faces");
  for (int i = 0; i < 3; ++i)
    if (faces_[i].label != i)
      throw std::runtime_error("graph construction: face labels not 0,1,2");

  // record the probes, then gather well-spread interior samples per face
  bool probed[3] = {false, false, false};
  for (const auto &[pt, label] : probes) {
    faces_[label].probe = pt;
    probed[label] = true;
  }
  face_samples_.assign(3, {});
  std::vector<std::vector<SpherePoint>> cand(3);
  for (int i = 0; i < 3; ++i)
    if (probed[i]) cand[i].push_back(faces_[i].probe);
  for (double r : {0.22, 0.5, 0.9, 1.45, 2.3, 3.3}) {
    for (int j = 0; j < 24; ++j) {
      double th = 2 * M_PI * (j + 0.31) / 24;
      SpherePoint z(cplx(r * std::cos(th), r * std::sin(th)));
      int lab = face_of(z);
      if (lab >= 0 && dist_to_graph(z) > 4 * band_ && cand[lab].size() < 40)
        cand[lab].push_back(z);
    }
  }
  for (int i = 0; i < 3; ++i) {
    auto &sel = face_samples_[i];
    sel.push_back(cand[i][0]);
    while (sel.size() < 4 && sel.size() < cand[i].size()) {
      double best_d = -1;
      SpherePoint best;
      for (const auto &c : cand[i]) {
        double d = 1e9;
        for (const auto &s : sel) d = std::min(d, chordal(c, s));
        if (d > best_d) {
          best_d = d;
          best = c;
        }
      }
      if (best_d < 1e-6) break;
      sel.push_back(best);
    }
    if (sel.size() < 2)
      throw std::runtime_error(
          "graph construction: too few interior samples in face " +
          std::to_string(i));
    if (!probed[i]) faces_[i].probe = sel[0];
  }
}

int InvariantGraph::face_of_polygons(const SpherePoint &z) const {
  for (size_t i = 0; i < faces_.size(); ++i)
    if (std::abs(winding_number(face_polys_[i], z, exclude_pts_[i])) > 0.5)
      return faces_[i].label;
  return -1;
}

SpherePoint InvariantGraph::nudged_off_graph(const SpherePoint &z) const {
  auto ns = nearest_segment(arcs_, z);
  if (ns.arc < 0) return z;
  const auto &pts = arcs_[ns.arc].points;
  SpherePoint a = pts[ns.seg], b = pts[ns.seg + 1];
  cplx ta, tb;
  if (a.at_inf_chart && b.at_inf_chart) {
    ta = a.v;
    tb = b.v;
  } else {
    ta = a.plane();
    tb = b.plane();
  }
  cplx nrm = norm1(cplx(0, 1) * (tb - ta));
  double d = 3 * band_;
  // prefer the side pointing away from a closed basin's center
  if (closed_basin_ && arcs_[ns.arc].name.rfind("bnd", 0) == 0 &&
      !a.at_inf_chart) {
    cplx away = norm1(ta - closed_center_);
    if ((nrm * std::conj(away)).real() < 0) nrm = -nrm;
    return SpherePoint::from_plane(z.plane() + d * nrm);
  }
  for (double s : {1.0, -1.0, 2.5, -2.5}) {
    SpherePoint cnd = z.at_inf_chart
                          ? SpherePoint(z.v + s * d * nrm, true)
                          : SpherePoint::from_plane(z.plane() + s * d * nrm);
    if (face_of_polygons(cnd) >= 0 && !in_blob(cnd)) return cnd;
  }
  return z;
}

int InvariantGraph::face_of(const SpherePoint &z) const {
  if (in_blob(z)) return -1;
  double d = dist_to_graph(z);
  if (d < kOnGraph) return -1;
  int lab = face_of_polygons(z);
  if (lab < 0 && d < band_) lab = face_of_polygons(nudged_off_graph(z));
  return lab;
}

bool InvariantGraph::in_blob(const SpherePoint &z) const {
  if (z.at_inf_chart && std::abs(z.v) < 1.0 / 20) return false;
  cplx p = z.plane();
  for (const auto &b : blobs_) {
    if (std::abs(p - b.disk_center) > b.disk_radius) continue;
    cplx w = p;
    bool stays = true;
    for (int it = 0; it < 400 && stays; ++it) {
      for (int k = 0; k < b.return_time; ++k) w = f_(w);
      if (!std::isfinite(w.real()) ||
          std::abs(w - b.disk_center) > b.disk_radius * 1.05)
        stays = false;
    }
    if (stays) return true;
  }
  return false;
}

double InvariantGraph::dist_to_graph(const SpherePoint &z) const {
  double d = nearest_segment(arcs_, z).dist;
  for (const auto &b : blobs_)
    for (const auto &c : b.cloud) d = std::min(d, chordal(z, SpherePoint(c)));
  return d;
}

std::vector<std::vector<uint8_t>>
InvariantGraph::itinerary(const SpherePoint &z, size_t n) const {
  struct Track {
    std::vector<uint8_t> word;
    cplx side;
    bool sided;
  };
  std::vector<Track> tracks;
  double near_band = std::max(band_, 10 * kOnGraph);

  auto spawn_sides = [&](const SpherePoint &at, double d0) {
    std::vector<std::pair<int, cplx>> found;
    double r = std::max(3 * d0, 6 * band_);
    for (int attempt = 0; attempt < 4 && found.empty(); ++attempt, r *= 3) {
      for (int j = 0; j < 8; ++j) {
        cplx dir = std::polar(1.0, 2 * M_PI * (j + 0.37) / 8);
        SpherePoint p = at.at_inf_chart
                            ? SpherePoint(at.v + r * dir, true)
                            : SpherePoint::from_plane(at.plane() + r * dir);
        int lab = face_of(p);
        if (lab < 0) continue;
        bool dup = false;
        for (auto &[l, s] : found) dup = dup || l == lab;
        if (!dup) found.push_back({lab, dir});
      }
    }
    if (found.empty())
      throw std::runtime_error(
          "itinerary: no adjacent face found at an on-graph point");
    return found;
  };

  SpherePoint cur = z;
  double d0 = dist_to_graph(cur);
  if (d0 >= near_band) {
    tracks.push_back({{}, cplx(0, 0), false});
  } else {
    for (auto &[lab, dir] : spawn_sides(cur, d0))
      tracks.push_back({{}, dir, true});
  }

  for (size_t step = 0; step < n; ++step) {
    double d = dist_to_graph(cur);
    bool on = d < near_band;
    int plain_label = -2;
    if (!on) {
      plain_label = face_of(cur);
      if (plain_label < 0)
        throw std::runtime_error(
            "itinerary: orbit point is inside a small filled copy");
    }
    std::vector<Track> next_tracks;
    for (auto &t : tracks) {
      if (!on) {
        t.word.push_back(uint8_t(plain_label));
        next_tracks.push_back(t);
        continue;
      }
      if (!t.sided) {
        // orbit touched the graph at positive depth: branch into both sides
        auto sides = spawn_sides(cur, d);
        if (tracks.size() - 1 + next_tracks.size() + sides.size() > 4)
          throw std::runtime_error(
              "itinerary: ambiguity overflow (graph hit at depth " +
              std::to_string(step) + ")");
        for (auto &[lab, dir] : sides) {
          Track b = t;
          b.side = dir;
          b.sided = true;
          b.word.push_back(uint8_t(lab));
          next_tracks.push_back(b);
        }
        continue;
      }
      double r = std::max(3 * d, 6 * band_);
      int lab = -1;
      for (int attempt = 0; attempt < 4 && lab < 0; ++attempt, r *= 3) {
        SpherePoint p = cur.at_inf_chart
                            ? SpherePoint(cur.v + r * t.side, true)
                            : SpherePoint::from_plane(cur.plane() + r * t.side);
        lab = face_of(p);
      }
      if (lab < 0)
        throw std::runtime_error("itinerary: side probe failed at depth " +
                                 std::to_string(step));
      t.word.push_back(uint8_t(lab));
      next_tracks.push_back(t);
    }
    // merge tracks whose words agree
    std::sort(next_tracks.begin(), next_tracks.end(),
              [](const Track &a, const Track &b) { return a.word < b.word; });
    next_tracks.erase(std::unique(next_tracks.begin(), next_tracks.end(),
                                  [](const Track &a, const Track &b) {
                                    return a.word == b.word;
                                  }),
                      next_tracks.end());
    tracks = next_tracks;
    for (auto &t : tracks)
      if (t.sided) t.side = transport_side(f_, cur, t.side);
    cur = f_(cur);
  }

  std::vector<std::vector<uint8_t>> words;
  for (auto &t : tracks) words.push_back(t.word);
  std::sort(words.begin(), words.end());
  words.erase(std::unique(words.begin(), words.end()), words.end());
  return words;
}

SpherePoint InvariantGraph::pullback_into_face(const SpherePoint &y,
                                               int face_label) const {
  auto pres = f_.preimages(y);
  std::vector<SpherePoint> uniq;
  for (auto &p : pres) {
    bool dup = false;
    for (auto &u : uniq) dup = dup || chordal(p, u) < 1e-11;
    if (!dup) uniq.push_back(p);
  }
  std::vector<SpherePoint> exact;
  std::vector<SpherePoint> boundary;
  for (auto &p : uniq) {
    int lab = face_of(p);
    if (lab == face_label)
      exact.push_back(p);
    else if (lab < 0)
      boundary.push_back(p);
  }
  if (exact.size() == 1) return exact[0];
  if (exact.size() > 1)
    throw std::runtime_error(
        "pullback not unique across the face partition (label " +
        std::to_string(face_label) + ")");
  for (auto &p : boundary)
    if (face_of_polygons(nudged_off_graph(p)) == face_label) return p;
  throw std::runtime_error("no preimage in face " +
                           std::to_string(face_label));
}

SpherePoint InvariantGraph::nest_point(const std::vector<uint8_t> &w) const {
  if (w.empty()) throw std::invalid_argument("nest: empty word");
  auto key = word_str(w);
  auto it = nest_cache_.find(key);
  if (it != nest_cache_.end()) return it->second.first;
  nest_diameter(w);
  return nest_cache_.at(key).first;
}

double InvariantGraph::nest_diameter(const std::vector<uint8_t> &w) const {
  if (w.empty()) throw std::invalid_argument("nest: empty word");
  auto key = word_str(w);
  auto it = nest_cache_.find(key);
  if (it != nest_cache_.end()) return it->second.second;
  std::vector<SpherePoint> pts = face_samples(w.back());
  for (size_t i = w.size() - 1; i-- > 0;) {
    for (auto &p : pts) {
      try {
        p = pullback_into_face(p, w[i]);
      } catch (const std::runtime_error &e) {
        throw std::runtime_error(std::string(e.what()) + " while refining " +
                                 key + " at position " + std::to_string(i));
      }
    }
  }
  double diam = 0;
  for (size_t i = 0; i < pts.size(); ++i)
    for (size_t j = i + 1; j < pts.size(); ++j)
      diam = std::max(diam, chordal(pts[i], pts[j]));
  diam *= 2; // sample spread to piece diameter, safety factor
  nest_cache_[key] = {pts[0], diam};
  return diam;
}

// ---------------------------------------------------------------------------
// graph builders

namespace {

struct Assembler {
  InvariantGraph *g = nullptr;
  std::vector<GraphVertex> vertices;
  std::vector<GraphArc> arcs;

  int vertex(const std::string &name, const SpherePoint &pos) {
    for (size_t i = 0; i < vertices.size(); ++i)
      if (chordal(vertices[i].pos, pos) < 5e-6) return int(i);
    vertices.push_back({name, pos});
    return int(vertices.size()) - 1;
  }
  void arc(const std::string &name, int vi, int vj,
           std::vector<SpherePoint> pts) {
    arcs.push_back({name, vi, vj, std::move(pts)});
  }
};

void require_landed(const Landing &l, const std::string &what) {
  if (!l.landed)
    throw std::runtime_error("graph construction: ray " + what +
                             " did not land");
}

void require_close(const SpherePoint &a, const SpherePoint &b, double tol,
                   const std::string &what) {
  if (chordal(a, b) > tol) {
    std::ostringstream os;
    os << "graph construction: " << what << " mismatch (" << chordal(a, b)
       << " > " << tol << ")";
    throw std::runtime_error(os.str());
  }
}

std::vector<SpherePoint> ext_ray(RayEngine &rays, const Angle &t,
                                 Landing &land) {
  land = rays.trace_external(t);
  require_landed(land, "external " + t.str());
  std::vector<SpherePoint> pts{SpherePoint::infinity()};
  auto arc = rays.external_arc(t, land.level);
  pts.insert(pts.end(), arc.begin(), arc.end());
  pts.push_back(land.point);
  return pts;
}

std::vector<SpherePoint> int_ray(RayEngine &rays, int basin, const Angle &t,
                                 Landing &land) {
  land = rays.trace_internal(basin, t);
  require_landed(land, "internal " + t.str());
  std::vector<SpherePoint> pts{SpherePoint(rays.basin_center(basin))};
  auto arc = rays.internal_arc(basin, t, land.level);
  pts.insert(pts.end(), arc.begin(), arc.end());
  pts.push_back(land.point);
  return pts;
}

std::vector<SpherePoint> copy_ray(RayEngine &rays, int basin, cplx center,
                                  const Angle &t, Landing &land) {
  land = rays.trace_copy(basin, center, t);
  require_landed(land, "copy " + t.str());
  std::vector<SpherePoint> pts{SpherePoint(center)};
  auto arc = rays.copy_arc(basin, center, t, land.level);
  pts.insert(pts.end(), arc.begin(), arc.end());
  pts.push_back(land.point);
  return pts;
}

std::vector<SpherePoint> chord(const SpherePoint &a, const SpherePoint &b) {
  std::vector<SpherePoint> pts;
  for (int i = 0; i <= 16; ++i) pts.push_back(lerp_sp(a, b, i / 16.0));
  return pts;
}

// inverse iteration of the return map along the cycle of copies; disks are
// centred on the critical orbit
struct BlobData {
  std::vector<cplx> centers;  // c_j = f^j(crit), j = 0..k-1
  std::vector<double> radii;  // per-copy pruning radius
  std::vector<cplx> cloud0;   // boundary samples of the j = 0 copy
};

BlobData build_blob_cloud(const Map &f, cplx crit, long k,
                          const std::vector<cplx> &seeds) {
  BlobData bd;
  cplx w = crit;
  bd.centers.push_back(crit);
  for (long j = 1; j < k; ++j) {
    w = f(w);
    bd.centers.push_back(w);
  }
  // each copy of the small filled set is pruned against its own disk; the
  // scale comes from the attachment seeds, not the critical cycle (the cycle
  // hops between disjoint copies, so cycle distances measure the gap instead)
  std::vector<cplx> simg = seeds;
  for (long j = 0; j < k; ++j) {
    double r = 0;
    for (cplx s : simg) r = std::max(r, std::abs(s - bd.centers[size_t(j)]));
    bd.radii.push_back(r);
    for (auto &s : simg) s = f(s);
  }
  double r0 = bd.radii[0];
  for (auto &r : bd.radii) r = std::max({2 * r, 0.6 * r0, 1e-3});
  std::vector<cplx> cur = seeds;
  for (int level = 0; level < 9; ++level) {
    std::vector<cplx> pool = cur;
    for (long s = 1; s <= k; ++s) {
      size_t cj = size_t((k - s) % k);
      std::vector<cplx> nxt;
      for (cplx z : pool)
        for (cplx p : f.preimages(z))
          if (std::abs(p - bd.centers[cj]) < bd.radii[cj] * 1.3)
            nxt.push_back(p);
      pool = nxt;
      if (pool.size() > 4000) pool.resize(4000);
    }
    for (cplx z : pool) cur.push_back(z);
    // dedupe on a grid
    std::sort(cur.begin(), cur.end(), [](cplx a, cplx b) {
      return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    std::vector<cplx> ded;
    for (cplx z : cur) {
      bool dup = false;
      for (auto it = ded.rbegin(); it != ded.rend() && !dup; ++it) {
        if (z.real() - it->real() > 1e-5) break;
        dup = std::abs(z - *it) < 1e-5;
      }
      if (!dup) ded.push_back(z);
    }
    cur = ded;
    if (cur.size() > 1500) break;
  }
  bd.cloud0 = cur;
  return bd;
}

Blob make_blob(const std::string &name, const SpherePoint &aa,
               const SpherePoint &ab, const std::vector<cplx> &cloud,
               long k) {
  Blob b;
  b.name = name;
  b.attach_a = aa;
  b.attach_b = ab;
  b.return_time = int(k);
  b.cloud = cloud;
  cplx mean = 0;
  for (cplx z : cloud) mean += z;
  mean /= double(cloud.size());
  double rad = 0;
  for (cplx z : cloud) rad = std::max(rad, std::abs(z - mean));
  rad = std::max(rad, std::abs(aa.plane() - mean));
  rad = std::max(rad, std::abs(ab.plane() - mean));
  b.disk_center = mean;
  b.disk_radius = rad * 1.2 + 1e-4;
  return b;
}

// adaptive landing polyline of a closed basin boundary over [qa, qb]
std::vector<SpherePoint> basin_boundary(RayEngine &rays, int basin,
                                        mpq_class qa, mpq_class qb,
                                        double gap, double &max_gap_seen) {
  struct Node {
    mpq_class q;
    SpherePoint p;
  };
  auto land = [&](const mpq_class &q) {
    mpq_class m = q;
    while (m >= 1) m -= 1;
    Landing l = rays.trace_internal(basin, Angle(m), 1e-7, 3000);
    return l.point; // accept the deepest point even on slow landings
  };
  std::vector<Node> nodes{{qa, land(qa)}, {qb, land(qb)}};
  for (size_t i = 0; i + 1 < nodes.size();) {
    double d = chordal(nodes[i].p, nodes[i + 1].p);
    mpq_class dq = nodes[i + 1].q - nodes[i].q;
    if (d > gap && dq > mpq_class(1, 1 << 14) && nodes.size() < 4000) {
      mpq_class mid = (nodes[i].q + nodes[i + 1].q) / 2;
      nodes.insert(nodes.begin() + i + 1, {mid, land(mid)});
    } else {
      max_gap_seen = std::max(max_gap_seen, d);
      ++i;
    }
  }
  std::vector<SpherePoint> pts;
  for (auto &n : nodes) pts.push_back(n.p);
  return pts;
}

} // namespace

InvariantGraph InvariantGraph::sym_graph() {
  Map f = Map::cubic_sym();
  InvariantGraph g(f);
  g.rays_ = std::make_shared<RayEngine>(f);
  RayEngine &rays = *g.rays_;
  double rt = std::sqrt(1.5);
  int b2 = rays.basin_index(cplx(0, 1 / std::sqrt(2.0)));
  int b3 = rays.basin_index(cplx(0, -1 / std::sqrt(2.0)));

  Assembler A;
  int vinf = A.vertex("inf", SpherePoint::infinity());
  int va2 = A.vertex("a2", SpherePoint(cplx(0, 1 / std::sqrt(2.0))));
  int va3 = A.vertex("a3", SpherePoint(cplx(0, -1 / std::sqrt(2.0))));
  int vp = A.vertex("p", SpherePoint(cplx(0, 0)));
  int vpp = A.vertex("p'", SpherePoint(cplx(0, rt)));
  int vppp = A.vertex("p''", SpherePoint(cplx(0, -rt)));

  Landing l;
  auto e0 = ext_ray(rays, Angle(0, 1), l);
  require_close(l.point, A.vertices[vp].pos, 2e-5, "external 0 landing at p");
  A.arc("ext0", vinf, vp, e0);
  auto e1 = ext_ray(rays, Angle(1, 3), l);
  require_close(l.point, A.vertices[vpp].pos, 2e-5,
                "external 1/3 landing at p'");
  A.arc("ext1/3", vinf, vpp, e1);
  auto e2 = ext_ray(rays, Angle(2, 3), l);
  require_close(l.point, A.vertices[vppp].pos, 2e-5,
                "external 2/3 landing at p''");
  A.arc("ext2/3", vinf, vppp, e2);

  auto i20 = int_ray(rays, b2, Angle(0, 1), l);
  require_close(l.point, A.vertices[vp].pos, 2e-5, "upper ray 0 landing at p");
  A.arc("up0", va2, vp, i20);
  auto i2h = int_ray(rays, b2, Angle(1, 2), l);
  require_close(l.point, A.vertices[vpp].pos, 2e-5,
                "upper ray 1/2 landing at p'");
  A.arc("up1/2", va2, vpp, i2h);
  auto i30 = int_ray(rays, b3, Angle(0, 1), l);
  require_close(l.point, A.vertices[vp].pos, 2e-5, "lower ray 0 landing at p");
  A.arc("lo0", va3, vp, i30);
  auto i3h = int_ray(rays, b3, Angle(1, 2), l);
  require_close(l.point, A.vertices[vppp].pos, 2e-5,
                "lower ray 1/2 landing at p''");
  A.arc("lo1/2", va3, vppp, i3h);

  g.vertices_ = A.vertices;
  g.arcs_ = A.arcs;
  g.band_ = 8e-4;
  double mid = 2.0 * rays.subdiv();
  g.finalize_faces({{rays.external_point(Angle(5, 6), mid), 0},
                    {rays.external_point(Angle(1, 2), mid), 1},
                    {rays.external_point(Angle(1, 6), mid), 2}});
  return g;
}

InvariantGraph InvariantGraph::cubic_graph(cplx a, const Angle &t0,
                                           bool closed_basin) {
  Map f = Map::cubic(a);
  InvariantGraph g(f);
  g.rays_ = std::make_shared<RayEngine>(f);
  RayEngine &rays = *g.rays_;
  int b1 = rays.basin_index(cplx(0, 0));
  cplx cprime = -1.5 * a;
  double mid = 2.0 * rays.subdiv();
  Landing l;

  Assembler A;
  int vinf = A.vertex("inf", SpherePoint::infinity());

  if (!closed_basin) {
    auto period = doubling_period(t0);
    if (!period || *period < 2)
      throw std::invalid_argument(
          "graph construction: ray angle must have doubling period >= 2");
    long k = *period;

    auto i0 = int_ray(rays, b1, Angle(0, 1), l);
    SpherePoint p_fix = l.point;
    auto ih = int_ray(rays, b1, Angle(1, 2), l);
    SpherePoint p_half = l.point;
    std::vector<std::vector<SpherePoint>> icyc;
    std::vector<SpherePoint> delta;
    Angle tj = t0;
    for (long j = 0; j < k; ++j) {
      icyc.push_back(int_ray(rays, b1, tj, l));
      delta.push_back(l.point);
      tj = tj.times(2);
    }

    auto e0 = ext_ray(rays, Angle(0, 1), l);
    require_close(l.point, p_fix, 2e-5, "external 0 at the boundary fixed point");
    auto e1 = ext_ray(rays, Angle(1, 3), l);
    SpherePoint p_copy = l.point;
    auto e2 = ext_ray(rays, Angle(2, 3), l);
    require_close(l.point, p_half, 2e-5, "external 2/3 at the 1/2-landing");

    auto c0 = copy_ray(rays, b1, cprime, Angle(0, 1), l);
    require_close(l.point, p_copy, 2e-5, "copy ray 0 at the external 1/3 point");
    auto c2 = copy_ray(rays, b1, cprime, t0.times(2), l);
    SpherePoint x_att = l.point;

    int v0 = A.vertex("center", SpherePoint(cplx(0, 0)));
    int vc = A.vertex("c'", SpherePoint(cprime));
    int vpf = A.vertex("p", p_fix);
    int vph = A.vertex("p''", p_half);
    int vpc = A.vertex("p'", p_copy);
    int vx = A.vertex("x", x_att);
    std::vector<int> vd;
    for (long j = 0; j < k; ++j)
      vd.push_back(A.vertex("delta" + std::to_string(j), delta[j]));

    A.arc("ext0", vinf, vpf, e0);
    A.arc("ext1/3", vinf, vpc, e1);
    A.arc("ext2/3", vinf, vph, e2);
    A.arc("int0", v0, vpf, i0);
    A.arc("int1/2", v0, vph, ih);
    tj = t0;
    for (long j = 0; j < k; ++j) {
      A.arc("int" + tj.str(), v0, vd[j], icyc[j]);
      tj = tj.times(2);
    }
    A.arc("copy0", vc, vpc, c0);
    A.arc("copy" + t0.times(2).str(), vc, vx, c2);
    A.arc("spine", vx, vd[0], chord(x_att, delta[0]));

    auto bd = build_blob_cloud(f, -a, k, {delta[0].plane(), x_att.plane()});
    g.blobs_.push_back(make_blob("K", delta[0], x_att, bd.cloud0, k));
    std::vector<cplx> cl = bd.cloud0;
    for (long j = 1; j < k; ++j) {
      for (auto &z : cl) z = f(z);
      g.blobs_.push_back(make_blob("K" + std::to_string(j), delta[j], delta[j],
                                   cl, k));
    }

    g.vertices_ = A.vertices;
    g.arcs_ = A.arcs;
    g.band_ = 8e-4;
  } else {
    // boundary-parameter variant: the closed immediate basin joins the graph
    Angle t = t0.times(2);
    double max_gap = 0;
    auto land_at = [&](const Angle &s) {
      Landing li = rays.trace_internal(b1, s, 1e-7, 3000);
      return li.point;
    };
    SpherePoint d0 = land_at(Angle(0, 1));
    SpherePoint dt0 = land_at(t0);
    SpherePoint dh = land_at(Angle(1, 2));
    require_close(dt0, SpherePoint(-a), 2e-3,
                  "critical point on the basin boundary at angle t/2");

    auto e0 = ext_ray(rays, Angle(0, 1), l);
    require_close(l.point, d0, 1e-4, "external 0 at the boundary fixed point");
    auto e1 = ext_ray(rays, Angle(1, 3), l);
    SpherePoint p_copy = l.point;
    auto e2 = ext_ray(rays, Angle(2, 3), l);
    require_close(l.point, dh, 1e-4, "external 2/3 at the 1/2-landing");
    auto c0 = copy_ray(rays, b1, cprime, Angle(0, 1), l);
    require_close(l.point, p_copy, 1e-4, "copy ray 0 at the external 1/3 point");
    auto ct = copy_ray(rays, b1, cprime, t, l);
    require_close(l.point, dt0, 2e-3, "copy ray t at the critical point");

    double gap = 2.5e-3;
    auto bnd1 = basin_boundary(rays, b1, 0, t0.rat(), gap, max_gap);
    auto bnd2 = basin_boundary(rays, b1, t0.rat(), mpq_class(1, 2), gap,
                               max_gap);
    auto bnd3 = basin_boundary(rays, b1, mpq_class(1, 2), 1, gap, max_gap);

    int vd0 = A.vertex("p", d0);
    int vma = A.vertex("-a", dt0);
    int vdh = A.vertex("p''", dh);
    int vpc = A.vertex("p'", p_copy);
    int vc = A.vertex("c'", SpherePoint(cprime));
    bnd1.front() = d0;
    bnd1.back() = dt0;
    bnd2.front() = dt0;
    bnd2.back() = dh;
    bnd3.front() = dh;
    bnd3.back() = d0;
    A.arc("bnd1", vd0, vma, bnd1);
    A.arc("bnd2", vma, vdh, bnd2);
    A.arc("bnd3", vdh, vd0, bnd3);
    A.arc("ext0", vinf, vd0, e0);
    A.arc("ext1/3", vinf, vpc, e1);
    A.arc("ext2/3", vinf, vdh, e2);
    A.arc("copy0", vc, vpc, c0);
    A.arc("copy" + t.str(), vc, vma, ct);

    g.vertices_ = A.vertices;
    g.arcs_ = A.arcs;
    g.closed_basin_ = true;
    g.closed_center_ = cplx(0, 0);
    g.band_ = std::max(1.5e-3, 0.75 * max_gap);
  }

  g.finalize_faces({{rays.external_point(Angle(1, 6), mid), 0},
                    {rays.external_point(Angle(1, 2), mid), 1},
                    {rays.external_point(Angle(5, 6), mid), 2}});
  return g;
}

InvariantGraph InvariantGraph::newton_graph(cplx lambda, const Angle &t0,
                                            bool closed_basin) {
  Map f = Map::newton(lambda);
  InvariantGraph g(f);
  g.rays_ = std::make_shared<RayEngine>(f);
  RayEngine &rays = *g.rays_;
  auto roots = f.newton_roots();
  int b1 = rays.basin_index(roots[0]);
  int b2 = rays.basin_index(roots[1]);
  int b3 = rays.basin_index(roots[2]);
  cplx w1 = f.newton_copreimage(roots[0]);
  double mid = 2.0 * rays.subdiv();
  Landing l;

  Assembler A;
  int vinf = A.vertex("inf", SpherePoint::infinity());
  int vb2 = A.vertex("b2", SpherePoint(roots[1]));
  int vb3 = A.vertex("b3", SpherePoint(roots[2]));
  int vw1 = A.vertex("w1", SpherePoint(w1));

  auto i20 = int_ray(rays, b2, Angle(0, 1), l);
  require_close(l.point, SpherePoint::infinity(), 2e-5, "ray 2:0 at infinity");
  auto i30 = int_ray(rays, b3, Angle(0, 1), l);
  require_close(l.point, SpherePoint::infinity(), 2e-5, "ray 3:0 at infinity");
  auto i2h = int_ray(rays, b2, Angle(1, 2), l);
  SpherePoint q = l.point;
  auto i3h = int_ray(rays, b3, Angle(1, 2), l);
  SpherePoint qq = l.point;
  require_close(SpherePoint::from_plane(f(q.plane())), SpherePoint::infinity(),
                2e-4, "pole landing of ray 2:1/2");
  require_close(SpherePoint::from_plane(f(qq.plane())),
                SpherePoint::infinity(), 2e-4, "pole landing of ray 3:1/2");
  auto c0 = copy_ray(rays, b1, w1, Angle(0, 1), l);
  require_close(l.point, qq, 2e-5, "copy ray 0 co-landing with ray 3:1/2");

  if (!closed_basin) {
    auto period = doubling_period(t0);
    if (!period || *period < 2)
      throw std::invalid_argument(
          "graph construction: ray angle must have doubling period >= 2");
    long k = *period;

    auto i10 = int_ray(rays, b1, Angle(0, 1), l);
    require_close(l.point, SpherePoint::infinity(), 2e-5,
                  "ray 1:0 at infinity");
    auto i1h = int_ray(rays, b1, Angle(1, 2), l);
    require_close(l.point, q, 2e-5, "rays 1:1/2 and 2:1/2 co-landing");
    std::vector<std::vector<SpherePoint>> icyc;
    std::vector<SpherePoint> beta;
    Angle tj = t0;
    for (long j = 0; j < k; ++j) {
      icyc.push_back(int_ray(rays, b1, tj, l));
      beta.push_back(l.point);
      tj = tj.times(2);
    }
    auto c2 = copy_ray(rays, b1, w1, t0.times(2), l);
    SpherePoint betap = l.point;

    int vb1 = A.vertex("b1", SpherePoint(roots[0]));
    int vq = A.vertex("q", q);
    int vqq = A.vertex("q'", qq);
    int vbp = A.vertex("beta'", betap);
    std::vector<int> vb;
    for (long j = 0; j < k; ++j)
      vb.push_back(A.vertex("beta" + std::to_string(j), beta[j]));

    A.arc("r1:0", vb1, vinf, i10);
    A.arc("r2:0", vb2, vinf, i20);
    A.arc("r3:0", vb3, vinf, i30);
    A.arc("r1:1/2", vb1, vq, i1h);
    A.arc("r2:1/2", vb2, vq, i2h);
    A.arc("r3:1/2", vb3, vqq, i3h);
    A.arc("copy0", vw1, vqq, c0);
    A.arc("copy" + t0.times(2).str(), vw1, vbp, c2);
    A.arc("spine", vbp, vb[0], chord(betap, beta[0]));
    tj = t0;
    for (long j = 0; j < k; ++j) {
      A.arc("r1:" + tj.str(), vb1, vb[j], icyc[j]);
      tj = tj.times(2);
    }

    auto bd = build_blob_cloud(f, cplx(0, 0), k,
                               {beta[0].plane(), betap.plane()});
    g.blobs_.push_back(make_blob("K", beta[0], betap, bd.cloud0, k));
    std::vector<cplx> cl = bd.cloud0;
    for (long j = 1; j < k; ++j) {
      for (auto &z : cl) z = f(z);
      g.blobs_.push_back(
          make_blob("K" + std::to_string(j), beta[j], beta[j], cl, k));
    }

    g.vertices_ = A.vertices;
    g.arcs_ = A.arcs;
    g.band_ = 8e-4;
    g.finalize_faces({{SpherePoint(-roots[1] / 2.0), 0},
                      {SpherePoint(-roots[2] / 2.0), 2}});
  } else {
    Angle t = t0.times(2);
    double max_gap = 0;
    SpherePoint crit(cplx(0, 0));
    Landing lt = rays.trace_internal(b1, t0, 1e-7, 3000);
    require_close(lt.point, crit, 2e-3,
                  "critical point on the basin boundary at angle t/2");
    auto ct = copy_ray(rays, b1, w1, t, l);
    require_close(l.point, crit, 2e-3, "copy ray t at the critical point");

    double gap = 2.5e-3;
    auto bnd1 = basin_boundary(rays, b1, 0, t0.rat(), gap, max_gap);
    auto bnd2 = basin_boundary(rays, b1, t0.rat(), mpq_class(1, 2), gap,
                               max_gap);
    auto bnd3 = basin_boundary(rays, b1, mpq_class(1, 2), 1, gap, max_gap);

    int vx0 = A.vertex("x0", crit);
    int vq = A.vertex("q", q);
    int vqq = A.vertex("q'", qq);
    bnd1.front() = SpherePoint::infinity();
    bnd1.back() = crit;
    bnd2.front() = crit;
    bnd2.back() = q;
    bnd3.front() = q;
    bnd3.back() = SpherePoint::infinity();
    A.arc("bnd1", vinf, vx0, bnd1);
    A.arc("bnd2", vx0, vq, bnd2);
    A.arc("bnd3", vq, vinf, bnd3);
    A.arc("r2:0", vb2, vinf, i20);
    A.arc("r3:0", vb3, vinf, i30);
    A.arc("r2:1/2", vb2, vq, i2h);
    A.arc("r3:1/2", vb3, vqq, i3h);
    A.arc("copy0", vw1, vqq, c0);
    A.arc("copy" + t.str(), vw1, vx0, ct);

    g.vertices_ = A.vertices;
    g.arcs_ = A.arcs;
    g.closed_basin_ = true;
    g.closed_center_ = roots[0];
    g.band_ = std::max(1.5e-3, 0.75 * max_gap);
    Angle probe1 = Angle(t0.rat() / 2); // inside (0, t/2)
    g.finalize_faces(
        {{SpherePoint(rays.internal_point(b3, Angle(3, 4), mid)), 0},
         {SpherePoint(rays.internal_point(b3, probe1, mid)), 1},
         {SpherePoint(rays.internal_point(b2, Angle(1, 4), mid)), 2}});
  }
  return g;
}

} // namespace nmating
