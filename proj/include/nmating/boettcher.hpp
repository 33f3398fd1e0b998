#pragma once

#include <unordered_map>
#include <vector>

#include "nmating/angles.hpp"
#include "nmating/complexutil.hpp"
#include "nmating/maps.hpp"

namespace nmating {

struct Landing {
  bool landed = false;
  SpherePoint point;
  double level = 0;
};

// Traces dynamic rays by memoized pullback.
//
// External rays (polynomial families): potential levels g_s = G0 * 3^(-s/J);
// the map sends the point of angle t at level s to angle 3t at level s-J.
// Base levels s in [0,J) come from the coordinate at infinity, evaluated by
// the convergent product B(z) = z * prod_k (f^k(z) / f^(k-1)(z)^3)^(3^-(k+1)).
//
// Internal rays (immediate basin of a superattracting fixed point of local
// degree 2): radii rho_s = rho0^(2^(-s/J)) increasing to 1; the map sends
// angle t at level s to angle 2t at level s-J. Base levels come from the
// local coordinate series at the center.
//
// Copy rays: a non-immediate preimage component U' of a basin U on which f
// is injective carries the pulled back rays, ray'(t) = (f|U')^{-1}(ray(t)),
// selected by continuity from the component center.
//
// Levels are real-valued so arcs can be refined dyadically; they are
// memoized on a grid of 1/1024.
class RayEngine {
public:
  explicit RayEngine(const Map &f, int subdiv = 18,
                     double outer_potential = 13.8155, // log 1e6
                     double inner_radius = 0.05);

  const Map &map() const { return f_; }
  int subdiv() const { return J_; }

  // ---- external rays (Cubic, CubicSym only) ----
  SpherePoint external_point(const Angle &t, double level);
  Landing trace_external(const Angle &t, double tol = 1e-7,
                         double max_level = 2000);
  std::vector<SpherePoint> external_arc(const Angle &t, double to_level,
                                        double max_gap = 1e-3);

  // ---- internal rays ----
  // registers a superattracting fixed point as a basin on first use
  int basin_index(cplx center);
  cplx basin_center(int b) const { return basins_.at(b).center; }
  SpherePoint internal_point(int basin, const Angle &t, double level);
  Landing trace_internal(int basin, const Angle &t, double tol = 1e-7,
                         double max_level = 2000);
  std::vector<SpherePoint> internal_arc(int basin, const Angle &t,
                                        double to_level,
                                        double max_gap = 1e-3);

  // ---- copy rays ----
  SpherePoint copy_point(int basin, cplx copy_center, const Angle &t,
                         double level);
  Landing trace_copy(int basin, cplx copy_center, const Angle &t,
                     double tol = 1e-7, double max_level = 2000);
  std::vector<SpherePoint> copy_arc(int basin, cplx copy_center,
                                    const Angle &t, double to_level,
                                    double max_gap = 1e-3);

  // Coordinate at infinity for |z| large (Cubic, CubicSym).
  cplx bottcher_inf(cplx z, int terms = 60) const;
  // Local coordinate at a registered superattracting center: basin -> disk.
  cplx bottcher_center(int basin, cplx z) const;

private:
  struct Basin {
    cplx center;
    double rho0 = 0.05; // base ring radius in the disk coordinate
    std::vector<cplx> series; // coefficients of B(z) = sum b_k (z-c)^k, k>=1
  };
  struct Key {
    int ctx; // -1 external, basin index, or 1000+i for copy i
    Angle t;
    long level_q; // level quantized to 1/1024
    bool operator==(const Key &o) const {
      return ctx == o.ctx && level_q == o.level_q && t == o.t;
    }
  };
  struct KeyHash {
    size_t operator()(const Key &k) const {
      size_t h = k.t.hash();
      h ^= std::hash<long>()(k.level_q) + 0x9e3779b97f4a7c15ull + (h << 6);
      h ^= std::hash<int>()(k.ctx) * 2654435761u;
      return h;
    }
  };

  SpherePoint external_base(const Angle &t, double level);
  SpherePoint internal_base(int basin, const Angle &t, double level);
  SpherePoint pullback_toward(const SpherePoint &target,
                              const SpherePoint &predictor);
  Landing trace_generic(int ctx, const Angle &t, double tol, double max_level);
  std::vector<SpherePoint> arc_generic(int ctx, const Angle &t,
                                       double to_level, double max_gap);
  SpherePoint point_generic(int ctx, const Angle &t, double level);
  void build_center_series(Basin &b);

  Map f_;
  int J_;
  double G0_;
  double rho0_;
  std::vector<Basin> basins_;
  std::vector<std::pair<int, cplx>> copies_; // (basin, copy center)
  std::unordered_map<Key, SpherePoint, KeyHash> cache_;

  int copy_ctx(int basin, cplx copy_center);
};

// Index of the attracting basin whose cycle point the orbit of z reaches
// (within tol), among the map's superattracting fixed points. Returns -1
// for escape to infinity (polynomials), -2 if undecided after maxit.
int classify_basin(const Map &f, SpherePoint z, int maxit = 400,
                   double tol = 1e-6);

} // namespace nmating
