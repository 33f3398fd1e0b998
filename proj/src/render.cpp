#include "nmating/render.hpp"

#include <cmath>
#include <fstream>

#include "nmating/boettcher.hpp"

namespace nmating {

void Image::set(int x, int y, uint8_t r, uint8_t g, uint8_t b) {
  if (x < 0 || y < 0 || x >= width || y >= height) return;
  size_t i = 3 * (size_t(y) * width + x);
  rgb[i] = r;
  rgb[i + 1] = g;
  rgb[i + 2] = b;
}

void Image::write_ppm(const std::string &path) const {
  std::ofstream out(path, std::ios::binary);
  out << "P6\n" << width << " " << height << "\n255\n";
  out.write(reinterpret_cast<const char *>(rgb.data()),
            std::streamsize(rgb.size()));
}

namespace {

struct Shade {
  uint8_t r, g, b;
};

// distinct base hues per basin, darkened by convergence time
Shade shade_for(int basin, int steps, int maxit) {
  static const Shade base[] = {
      {230, 90, 60}, {70, 140, 230}, {90, 200, 110}, {230, 200, 70}};
  if (basin == -1) { // escape: grayscale by speed
    double v = 255.0 * std::exp(-0.03 * steps);
    auto g = uint8_t(v);
    return {g, g, uint8_t(255 - g / 2)};
  }
  if (basin < 0) return {10, 10, 14};
  Shade s = base[basin % 4];
  double f = 0.35 + 0.65 * std::exp(-3.0 * double(steps) / double(maxit));
  return {uint8_t(s.r * f), uint8_t(s.g * f), uint8_t(s.b * f)};
}

// fate of z under f: (basin index or -1 escape or -2 undecided, steps)
std::pair<int, int> orbit_fate(const Map &f, cplx z, int maxit) {
  std::vector<cplx> centers;
  switch (f.family()) {
  case Family::Cubic:
    centers = {cplx(0, 0)};
    break;
  case Family::CubicSym:
    centers = {cplx(0, 1.0 / std::sqrt(2.0)), cplx(0, -1.0 / std::sqrt(2.0))};
    break;
  case Family::Newton: {
    auto r = f.newton_roots();
    centers = {r[0], r[1], r[2]};
    break;
  }
  }
  for (int i = 0; i < maxit; ++i) {
    for (size_t c = 0; c < centers.size(); ++c)
      if (std::abs(z - centers[c]) < 1e-6) return {int(c), i};
    if (f.family() != Family::Newton && std::abs(z) > 1e8) return {-1, i};
    z = f(z);
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return {-2, i};
  }
  return {-2, maxit};
}

} // namespace

Image render_julia(const Map &f, const ViewBox &box, int size, int maxit) {
  Image im;
  im.width = im.height = size;
  im.rgb.assign(size_t(3) * size * size, 0);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      double re = box.cx + box.half * (2.0 * x / (size - 1) - 1.0);
      double iy = box.cy - box.half * (2.0 * y / (size - 1) - 1.0);
      auto [basin, steps] = orbit_fate(f, cplx(re, iy), maxit);
      Shade s = shade_for(basin, steps, maxit);
      im.set(x, y, s.r, s.g, s.b);
    }
  }
  return im;
}

Image render_param(Family fam, const ViewBox &box, int size, int maxit) {
  Image im;
  im.width = im.height = size;
  im.rgb.assign(size_t(3) * size * size, 0);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      double re = box.cx + box.half * (2.0 * x / (size - 1) - 1.0);
      double iy = box.cy - box.half * (2.0 * y / (size - 1) - 1.0);
      cplx p(re, iy);
      Map f = fam == Family::Newton ? Map::newton(p) : Map::cubic(p);
      // follow the free critical orbit
      cplx z = fam == Family::Newton ? cplx(0, 0) : -p;
      auto [basin, steps] = orbit_fate(f, f(z), maxit);
      Shade s = shade_for(basin, steps, maxit);
      im.set(x, y, s.r, s.g, s.b);
    }
  }
  return im;
}

void write_sidecar(const std::string &image_path, const std::string &json) {
  std::ofstream out(image_path + ".json");
  out << json << "\n";
}

} // namespace nmating
