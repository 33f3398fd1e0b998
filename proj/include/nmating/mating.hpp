#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "nmating/angles.hpp"
#include "nmating/puzzle.hpp"

namespace nmating {

enum class Side { Dbas, Cubic };

// psi evaluated through the cylinder nests: the itinerary of z on the source
// graph becomes a puzzle address on the Newton graph
struct PsiResult {
  SpherePoint image;
  double err = 0;  // nest diameter plus spread across equivalent words
  std::vector<std::vector<uint8_t>> words;  // source itinerary words used
};

struct ResidualReport {
  double distance = 0;   // chordal |N(psi z) - psi(f z)|
  double allowance = 0;  // combined nest diameter bounds
  bool within() const { return distance <= allowance; }
};

// Semi-conjugacy from the Julia set of a polynomial family onto the Newton
// sphere. The source and target carry invariant graphs whose face labels
// are aligned, so itineraries transport directly; the orientation reversal
// of the gluing is encoded in the source labeling (the odd family codes the
// landing point of angle t by the digits of -t).
class SemiConjugacy {
public:
  // z^3 + (3/2) z  ->  N_lambda
  static SemiConjugacy dbas(cplx lambda, const Angle &t0, size_t depth = 12,
                            bool closed_basin = false);
  // z^2 (z + 3a/2)  ->  N_lambda
  static SemiConjugacy cubic(cplx a, cplx lambda, const Angle &t0,
                             size_t depth = 12, bool closed_basin = false);
  // both semi-conjugacies of a mating pair, sharing one Newton graph
  static std::pair<SemiConjugacy, SemiConjugacy> pair(cplx a, cplx lambda,
                                                      const Angle &t0,
                                                      size_t depth = 12,
                                                      bool closed_basin = false);

  SemiConjugacy(Side side, std::shared_ptr<InvariantGraph> source,
                std::shared_ptr<InvariantGraph> target, size_t depth = 12);

  Side side() const { return side_; }
  size_t depth() const { return depth_; }
  InvariantGraph &source() const { return *source_; }
  InvariantGraph &target() const { return *target_; }

  // landing point of the source external ray of angle t
  SpherePoint landing(const Angle &t) const;

  // symbol class of an angle in this side's convention (dbas consumes -t)
  ItinClass symbols_of_angle(const Angle &t) const;

  // z must lie on the source Julia set: escaping orbits and interior basin
  // points are rejected (the interior extension is a basin-coordinate
  // transport, not a nest limit)
  PsiResult psi(const SpherePoint &z) const { return psi(z, depth_); }
  PsiResult psi(const SpherePoint &z, size_t depth) const;

  ResidualReport residual(const SpherePoint &z, size_t depth) const;

private:
  Side side_;
  std::shared_ptr<InvariantGraph> source_, target_;
  size_t depth_;
};

struct VerifyReport {
  cplx lambda, a;
  bool has_a = false;
  size_t depth = 0;
  size_t samples = 0, landed = 0, violations = 0;
  double max_residual = 0, mean_residual = 0, max_allowance = 0;
  std::string to_json() const;
};

// Samples ray landings at seeded random rational angles (denominators
// coprime to 3, <= 3^8) and measures the conjugacy residual of each.
// Throws when fewer than 80% of the rays land.
VerifyReport verify_semiconjugacy(const SemiConjugacy &s, size_t samples,
                                  uint64_t seed);

struct RayChainLink {
  Angle angle;
  Side side;
  SpherePoint landing;
};

struct EquivResult {
  bool equal = false;
  double distance = 0, allowance = 0;
  std::vector<uint8_t> word_a, word_b;  // primary itinerary words
  std::string common_prefix;            // shared nest address prefix
  std::vector<RayChainLink> chain;      // filled by the angle-level call
};

// True when psi_A(z) and psi_B(w) coincide within the certified bounds;
// the certificate carries both words and the common address prefix.
EquivResult ray_equivalent(const SemiConjugacy &A, const SpherePoint &z,
                           const SemiConjugacy &B, const SpherePoint &w);
EquivResult ray_equivalent(const SemiConjugacy &A, const Angle &s,
                           const SemiConjugacy &B, const Angle &t);

struct CoverageReport {
  size_t grid_points = 0;
  size_t fatou_cubic = 0;   // basin of the first root and its preimages
  size_t fatou_dbas = 0;    // basins of the other two roots
  size_t copy_points = 0;   // small filled copies
  size_t julia_matched = 0; // itinerary transport verified through psi
  size_t uncovered = 0;
  double uncovered_fraction = 0;
  std::string to_json() const;
};

// Classifies a sphere grid against the two psi images: every point should
// be reachable from one of the sides (basins by coordinate correspondence,
// Julia points by itinerary transport).
CoverageReport surjectivity_sample(const SemiConjugacy &s_dbas,
                                   const SemiConjugacy &s_cubic,
                                   int resolution);

} // namespace nmating
