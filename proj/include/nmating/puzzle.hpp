#pragma once

#include <memory>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "nmating/angles.hpp"
#include "nmating/boettcher.hpp"
#include "nmating/maps.hpp"

namespace nmating {

struct GraphVertex {
  std::string name;
  SpherePoint pos;
};

struct GraphArc {
  std::string name;
  int v_from = -1, v_to = -1;
  std::vector<SpherePoint> points; // polyline, points.front()/back() at vertices
};

// A filled Julia set of a renormalization along the critical orbit, kept as
// a membership test plus a spine arc between its two boundary attachment
// points so the graph topology closes up.
struct Blob {
  std::string name;
  SpherePoint attach_a, attach_b;
  cplx disk_center;
  double disk_radius = 0;
  int return_time = 1; // orbit stays in the disk under f^return_time
  std::vector<cplx> cloud; // sampled boundary points, for rendering/export
};

struct GraphFace {
  int label = -1; // symbol used by itineraries
  std::vector<std::pair<int, bool>> boundary; // (arc, forward?) in cyclic order
  SpherePoint probe;
};

// Forward-invariant graph with exactly three complementary faces; the faces
// drive the symbolic dynamics (itineraries, nests).
class InvariantGraph {
public:
  // basin-ray graph for z^3 + (3/2) z
  static InvariantGraph sym_graph();
  // renormalization graph for z^3 + (3a/2) z^2 at ray period data t0
  static InvariantGraph cubic_graph(cplx a, const Angle &t0,
                                    bool closed_basin = false);
  // renormalization graph for the Newton family
  static InvariantGraph newton_graph(cplx lambda, const Angle &t0,
                                     bool closed_basin = false);

  const Map &map() const { return f_; }
  const std::vector<GraphVertex> &vertices() const { return vertices_; }
  const std::vector<GraphArc> &arcs() const { return arcs_; }
  const std::vector<Blob> &blobs() const { return blobs_; }
  const std::vector<GraphFace> &faces() const { return faces_; }

  // face containing z, or -1 when z sits on the graph or inside a blob
  int face_of(const SpherePoint &z) const;
  bool in_blob(const SpherePoint &z) const;
  double dist_to_graph(const SpherePoint &z) const;

  // itineraries against the face partition; points whose orbit touches the
  // graph report every word obtainable from nearby points (side transport)
  std::vector<std::vector<uint8_t>> itinerary(const SpherePoint &z,
                                              size_t n) const;

  // representative of the depth-|w| cylinder with itinerary w, found by
  // face-constrained pullback, plus a diameter bound from probe spread
  SpherePoint nest_point(const std::vector<uint8_t> &w) const;
  double nest_diameter(const std::vector<uint8_t> &w) const;

  // preimage of y lying in the face with the given label
  SpherePoint pullback_into_face(const SpherePoint &y, int face_label) const;

  RayEngine &rays() const { return *rays_; }

  // closed boundary polygon of a face (concatenated arc polylines)
  std::vector<SpherePoint> face_polygon(int face_index) const;
  // well-interior sample points of the face with the given label
  const std::vector<SpherePoint> &face_samples(int label) const;
  // classification uncertainty band around the traced polylines
  double band() const { return band_; }

private:
  InvariantGraph(Map f) : f_(f) {}
  // rotation-system face walks, interior-face removal, probe labeling,
  // decimated polygons, interior samples
  void finalize_faces(const std::vector<std::pair<SpherePoint, int>> &probes);
  int face_of_polygons(const SpherePoint &z) const; // no blob/band handling
  SpherePoint nudged_off_graph(const SpherePoint &z) const;

  Map f_;
  std::shared_ptr<RayEngine> rays_;
  std::vector<GraphVertex> vertices_;
  std::vector<GraphArc> arcs_;
  std::vector<Blob> blobs_;
  std::vector<GraphFace> faces_;
  std::vector<std::vector<SpherePoint>> face_polys_;   // decimated, per face
  std::vector<std::vector<SpherePoint>> face_samples_; // 4 per face
  std::vector<SpherePoint> exclude_pts_; // off-face chart anchors per face
  double band_ = 1e-3;
  bool closed_basin_ = false;
  cplx closed_center_;   // center of the basin whose closure is in the graph
  mutable std::unordered_map<std::string, std::pair<SpherePoint, double>>
      nest_cache_;
};

// winding number of a closed polyline around a point, both given on the
// sphere, computed in a chart that keeps the path away from infinity
double winding_number(const std::vector<SpherePoint> &loop,
                      const SpherePoint &around, const SpherePoint &exclude);

} // namespace nmating
