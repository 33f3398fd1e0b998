#include "nmating/mating.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "json.hpp"
#include "nmating/boettcher.hpp"

namespace nmating {

namespace {

std::string word_str(const std::vector<uint8_t> &w) {
  std::string s;
  for (auto d : w) s.push_back(char('0' + d));
  return s;
}

} // namespace

SemiConjugacy::SemiConjugacy(Side side, std::shared_ptr<InvariantGraph> source,
                             std::shared_ptr<InvariantGraph> target,
                             size_t depth)
    : side_(side), source_(std::move(source)), target_(std::move(target)),
      depth_(depth) {
  if (depth_ < 2 || depth_ > 24)
    throw std::invalid_argument("semi-conjugacy depth must lie in [2, 24]");
  if (target_->map().family() != Family::Newton)
    throw std::invalid_argument("semi-conjugacy target must be a Newton map");
}

SemiConjugacy SemiConjugacy::dbas(cplx lambda, const Angle &t0, size_t depth,
                                  bool closed_basin) {
  auto src = std::make_shared<InvariantGraph>(InvariantGraph::sym_graph());
  auto tgt = std::make_shared<InvariantGraph>(
      InvariantGraph::newton_graph(lambda, t0, closed_basin));
  return SemiConjugacy(Side::Dbas, src, tgt, depth);
}

SemiConjugacy SemiConjugacy::cubic(cplx a, cplx lambda, const Angle &t0,
                                   size_t depth, bool closed_basin) {
  auto src = std::make_shared<InvariantGraph>(
      InvariantGraph::cubic_graph(a, t0, closed_basin));
  auto tgt = std::make_shared<InvariantGraph>(
      InvariantGraph::newton_graph(lambda, t0, closed_basin));
  return SemiConjugacy(Side::Cubic, src, tgt, depth);
}

std::pair<SemiConjugacy, SemiConjugacy>
SemiConjugacy::pair(cplx a, cplx lambda, const Angle &t0, size_t depth,
                    bool closed_basin) {
  auto tgt = std::make_shared<InvariantGraph>(
      InvariantGraph::newton_graph(lambda, t0, closed_basin));
  auto sym = std::make_shared<InvariantGraph>(InvariantGraph::sym_graph());
  auto cub = std::make_shared<InvariantGraph>(
      InvariantGraph::cubic_graph(a, t0, closed_basin));
  return {SemiConjugacy(Side::Dbas, sym, tgt, depth),
          SemiConjugacy(Side::Cubic, cub, tgt, depth)};
}

SpherePoint SemiConjugacy::landing(const Angle &t) const {
  // tight tolerance: the orbit of the landing point feeds depth-16 (and
  // deeper) itineraries, which amplify the landing error exponentially
  Landing l = source_->rays().trace_external(t, 1e-10, 3000);
  if (!l.landed)
    throw std::runtime_error("external ray " + t.str() + " did not land");
  return l.point;
}

ItinClass SemiConjugacy::symbols_of_angle(const Angle &t) const {
  return itinerary_of_angle(side_ == Side::Dbas ? t.negated() : t);
}

PsiResult SemiConjugacy::psi(const SpherePoint &z, size_t depth) const {
  // membership is checked over the working depth only: longer orbits of
  // Julia points drift off the Julia set in binary64 anyway
  const Map &f = source_->map();
  std::vector<cplx> centers =
      side_ == Side::Dbas
          ? std::vector<cplx>{cplx(0, 1.0 / std::sqrt(2.0)),
                              cplx(0, -1.0 / std::sqrt(2.0))}
          : std::vector<cplx>{cplx(0, 0)};
  SpherePoint w = z;
  for (size_t i = 0; i <= depth; ++i) {
    if (w.at_inf_chart && std::abs(w.v) < 1e-6)
      throw std::domain_error(
          "psi: orbit escapes, not in the filled Julia set");
    if (!w.at_inf_chart)
      for (cplx c : centers)
        if (std::abs(w.v - c) < 0.03)
          throw std::domain_error(
              "psi: interior basin point; nest evaluation needs a Julia point");
    w = f(w);
  }
  auto words = source_->itinerary(z, depth);

  PsiResult r;
  std::vector<SpherePoint> pts;
  std::vector<double> dias;
  size_t best = 0;
  for (size_t i = 0; i < words.size(); ++i) {
    pts.push_back(target_->nest_point(words[i]));
    dias.push_back(target_->nest_diameter(words[i]));
    if (dias[i] < dias[best]) best = i;
  }
  std::swap(words[0], words[best]);
  std::swap(pts[0], pts[best]);
  std::swap(dias[0], dias[best]);
  r.image = pts[0];
  r.err = dias[0];
  for (size_t i = 1; i < pts.size(); ++i)
    r.err = std::max(r.err, dias[0] + chordal(pts[i], r.image));
  r.words = std::move(words);
  return r;
}

ResidualReport SemiConjugacy::residual(const SpherePoint &z,
                                       size_t depth) const {
  PsiResult r1 = psi(z, depth);
  SpherePoint fz = source_->map()(z);
  PsiResult r2 = psi(fz, depth);
  SpherePoint nimg = target_->map()(r1.image);

  ResidualReport rep;
  rep.distance = chordal(nimg, r2.image);
  // N(psi z) lies in the closed piece of the shifted address, psi(f z) in
  // its own nest; both shrink to the same point
  std::vector<uint8_t> shifted(r1.words[0].begin() + 1, r1.words[0].end());
  rep.allowance = target_->nest_diameter(shifted) + r2.err + 2e-5;
  return rep;
}

VerifyReport verify_semiconjugacy(const SemiConjugacy &s, size_t samples,
                                  uint64_t seed) {
  VerifyReport rep;
  rep.lambda = s.target().map().param();
  if (s.side() == Side::Cubic) {
    rep.a = s.source().map().param();
    rep.has_a = true;
  }
  rep.depth = s.depth();

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<long> denom(5, 6561);
  size_t draws = 0, unlanded = 0, evaluated = 0;
  double sum = 0;
  const size_t max_draws = samples * 12;
  while (evaluated < samples && draws < max_draws) {
    ++draws;
    long q = denom(rng);
    if (q % 3 == 0) continue;
    long p = std::uniform_int_distribution<long>(1, q - 1)(rng);
    Angle t(p, q);
    Landing l = s.source().rays().trace_external(t, 1e-10, 3000);
    if (!l.landed) {
      ++unlanded;
      continue;
    }
    ResidualReport rr;
    try {
      rr = s.residual(l.point, s.depth());
    } catch (const std::exception &) {
      continue; // landing on a small copy or ambiguity overflow: skip draw
    }
    ++evaluated;
    sum += rr.distance;
    rep.max_residual = std::max(rep.max_residual, rr.distance);
    rep.max_allowance = std::max(rep.max_allowance, rr.allowance);
    if (!rr.within()) ++rep.violations;
  }
  if (draws > 20 && unlanded * 5 > draws)
    throw std::runtime_error("verify: more than 20% of sampled rays failed "
                             "to land");
  if (evaluated < samples)
    throw std::runtime_error("verify: insufficient evaluable samples");
  rep.samples = evaluated;
  rep.landed = draws - unlanded;
  rep.mean_residual = sum / double(evaluated);
  return rep;
}

std::string VerifyReport::to_json() const {
  nlohmann::json j;
  j["lambda"] = {lambda.real(), lambda.imag()};
  if (has_a)
    j["a"] = {a.real(), a.imag()};
  else
    j["a"] = nullptr;
  j["depth"] = depth;
  j["samples"] = samples;
  j["max_residual"] = max_residual;
  j["mean_residual"] = mean_residual;
  j["violations"] = violations;
  j["uncovered_fraction"] = nullptr;
  return j.dump(2);
}

EquivResult ray_equivalent(const SemiConjugacy &A, const SpherePoint &z,
                           const SemiConjugacy &B, const SpherePoint &w) {
  PsiResult ra = A.psi(z);
  PsiResult rb = B.psi(w);
  EquivResult e;
  e.distance = chordal(ra.image, rb.image);
  e.allowance = ra.err + rb.err + 2e-5;
  e.equal = e.distance < e.allowance;
  e.word_a = ra.words[0];
  e.word_b = rb.words[0];
  size_t n = 0;
  while (n < e.word_a.size() && n < e.word_b.size() &&
         e.word_a[n] == e.word_b[n])
    ++n;
  e.common_prefix = word_str(e.word_a).substr(0, n);
  return e;
}

EquivResult ray_equivalent(const SemiConjugacy &A, const Angle &s,
                           const SemiConjugacy &B, const Angle &t) {
  SpherePoint z = A.landing(s);
  SpherePoint w = B.landing(t);
  EquivResult e = ray_equivalent(A, z, B, w);
  e.chain = {{s, A.side(), z}, {t, B.side(), w}};
  return e;
}

CoverageReport surjectivity_sample(const SemiConjugacy &s_dbas,
                                   const SemiConjugacy &s_cubic,
                                   int resolution) {
  if (std::abs(s_dbas.target().map().param() -
               s_cubic.target().map().param()) > 1e-12)
    throw std::invalid_argument("coverage needs a shared target parameter");
  InvariantGraph &g = s_dbas.target();

  auto transported = [&](const SemiConjugacy &s, const SpherePoint &u) {
    try {
      auto words = g.itinerary(u, s.depth());
      const auto &w = words[0];
      SpherePoint zsrc = s.source().nest_point(w);
      PsiResult r = s.psi(zsrc);
      return chordal(r.image, u) < r.err + g.nest_diameter(w) + 1e-3;
    } catch (const std::exception &) {
      return false;
    }
  };

  CoverageReport rep;
  size_t n = size_t(resolution) * size_t(resolution);
  rep.grid_points = n;
  const double golden = M_PI * (3.0 - std::sqrt(5.0));
  for (size_t i = 0; i < n; ++i) {
    double h = 1.0 - 2.0 * (double(i) + 0.5) / double(n);
    double rr = std::sqrt(std::max(0.0, 1.0 - h * h));
    double phi = golden * double(i);
    cplx plane(rr * std::cos(phi) / (1.0 - h), rr * std::sin(phi) / (1.0 - h));
    SpherePoint u = SpherePoint::from_plane(plane);
    int cb = classify_basin(g.map(), u);
    if (cb == 0) {
      ++rep.fatou_cubic;
    } else if (cb == 1 || cb == 2) {
      ++rep.fatou_dbas;
    } else if (g.in_blob(u)) {
      ++rep.copy_points;
    } else if (transported(s_dbas, u) || transported(s_cubic, u)) {
      ++rep.julia_matched;
    } else {
      ++rep.uncovered;
    }
  }
  rep.uncovered_fraction = double(rep.uncovered) / double(n);
  return rep;
}

std::string CoverageReport::to_json() const {
  nlohmann::json j;
  j["grid_points"] = grid_points;
  j["fatou_cubic"] = fatou_cubic;
  j["fatou_dbas"] = fatou_dbas;
  j["copy_points"] = copy_points;
  j["julia_matched"] = julia_matched;
  j["uncovered"] = uncovered;
  j["uncovered_fraction"] = uncovered_fraction;
  return j.dump(2);
}

} // namespace nmating
