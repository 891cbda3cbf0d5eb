#pragma once

// Shared test fixtures: the Fig-8-style shallow-line rectangle and its
// measurement helpers.

#include <algorithm>
#include <cmath>

#include "shellfill/lattice.hpp"
#include "shellfill/vec2.hpp"

namespace shellfill_tests {

using namespace shellfill;

/// A line of the given thickness crossing the whole image at `theta_deg`,
/// with a rectangular inpainting domain punched into the middle.
struct LineFixture {
  PixelGrid image;  // single channel: line = 1, background = 0
  FillState state;
  int x0, x1, y0, y1;  // the unfilled rectangle [x0,x1) x [y0,y1)
  double theta_deg;
  double yc;  // line center height at x = 0
  int thickness;

  bool in_band(int x, int y, double slack = 0.0) const {
    double t = std::tan(deg2rad(theta_deg));
    double d = y - (yc + t * x);
    return d >= -thickness / 2.0 - slack && d <= thickness / 2.0 + slack;
  }
};

inline LineFixture make_line_fixture(int W, int H, int margin_x, int margin_y,
                                     double theta_deg, int thickness) {
  LineFixture f{PixelGrid(W, H, 1, 1.0, BoundaryMode::dirichlet_x),
                FillState(W, H, BoundaryMode::dirichlet_x),
                margin_x,
                W - margin_x,
                margin_y,
                H - margin_y,
                theta_deg,
                H / 2.0 - std::tan(deg2rad(theta_deg)) * W / 2.0,
                thickness};
  for (int y = 0; y < H; ++y)
    for (int x = 0; x < W; ++x)
      if (f.in_band(x, y)) f.image.at(x, y, 0) = 1.0;
  for (int y = f.y0; y < f.y1; ++y)
    for (int x = f.x0; x < f.x1; ++x) f.state.set_unfilled(x, y);
  f.state.refresh_active();
  return f;
}

/// Peak value inside the line band between two columns.
inline double band_peak(const PixelGrid& img, const LineFixture& f, int cx0,
                        int cx1, double slack = 2.0) {
  double amp = 0.0;
  for (int x = cx0; x < cx1; ++x)
    for (int y = f.y0; y < f.y1; ++y)
      if (f.in_band(x, y, slack)) amp = std::max(amp, img.at(x, y, 0));
  return amp;
}

/// Orientation (degrees in (0, 90)) of the bright mass extending from the
/// left edge of the rectangle: per-column centroids + least squares.
inline double measure_kink_deg(const PixelGrid& img, const LineFixture& f,
                               int span) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (int x = f.x0; x < std::min(f.x0 + span, f.x1); ++x) {
    double m = 0, c = 0;
    for (int y = f.y0; y < f.y1; ++y) {
      m += img.at(x, y, 0);
      c += img.at(x, y, 0) * y;
    }
    if (m < 1e-6) continue;
    double cy = c / m;
    sx += x;
    sy += cy;
    sxx += double(x) * x;
    sxy += double(x) * cy;
    ++n;
  }
  if (n < 8) return 0.0;
  double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return rad2deg(std::atan(std::abs(slope)));
}

}  // namespace shellfill_tests
