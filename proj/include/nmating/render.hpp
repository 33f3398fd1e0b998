#pragma once

#include <string>
#include <vector>

#include "nmating/maps.hpp"

namespace nmating {

struct Image {
  int width = 0, height = 0;
  std::vector<uint8_t> rgb; // 3 bytes per pixel, row-major

  void set(int x, int y, uint8_t r, uint8_t g, uint8_t b);
  void write_ppm(const std::string &path) const;
};

struct ViewBox {
  double cx = 0, cy = 0, half = 2.0; // center and half-width
};

// basin-colored dynamical plane; escape/convergence shading
Image render_julia(const Map &f, const ViewBox &box, int size, int maxit);

// parameter plane: cubic (a-plane) or newton (lambda-plane), colored by the
// fate of the free critical orbit
Image render_param(Family fam, const ViewBox &box, int size, int maxit);

// JSON sidecar describing what was rendered
void write_sidecar(const std::string &image_path, const std::string &json);

} // namespace nmating
