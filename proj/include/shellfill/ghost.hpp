#pragma once

#include "shellfill/lattice.hpp"
#include "shellfill/stencil.hpp"

namespace shellfill {

/// The four bilinear supports of a (possibly ghost) offset relative to a
/// pixel, with their interpolation coefficients. Integer offsets collapse to
/// a single support. Zero-coefficient corners are dropped.
struct GhostSupport {
  IVec2 pos[4];     // absolute lattice positions (x not yet wrapped)
  double lambda[4];
  int count = 0;
};

inline GhostSupport ghost_support(int px, int py, Vec2 offset) {
  GhostSupport s;
  double gx = snap_to_int(px + offset.x);
  double gy = snap_to_int(py + offset.y);
  int x0 = int(std::floor(gx)), y0 = int(std::floor(gy));
  double fx = gx - x0, fy = gy - y0;
  const double cw[4] = {(1 - fx) * (1 - fy), fx * (1 - fy), (1 - fx) * fy,
                        fx * fy};
  const IVec2 cp[4] = {{x0, y0}, {x0 + 1, y0}, {x0, y0 + 1}, {x0 + 1, y0 + 1}};
  for (int k = 0; k < 4; ++k)
    if (cw[k] > 0.0) {
      s.pos[s.count] = cp[k];
      s.lambda[s.count] = cw[k];
      ++s.count;
    }
  return s;
}

/// A ghost point is usable iff every support pixel is known. Off-image rows
/// are never known; x wraps under periodic mode. Under dirichlet mode an
/// out-of-range column reads as value 0 only where the caller opts in.
inline bool ghost_usable(const FillState& state, const GhostSupport& s,
                         bool dirichlet_out_is_known = false) {
  for (int k = 0; k < s.count; ++k) {
    int x = s.pos[k].x, y = s.pos[k].y;
    if (y < 0 || y >= state.height) return false;
    if (x < 0 || x >= state.width) {
      if (state.boundary_mode == BoundaryMode::periodic_x) {
        // wrapped below
      } else if (!dirichlet_out_is_known) {
        return false;
      } else {
        continue;  // value-0 column
      }
    }
    if (!state.known(x, y)) return false;
  }
  return true;
}

/// Bilinear value of a usable ghost point (x wrapped; dirichlet out-of-range
/// columns contribute 0).
inline double ghost_value(const PixelGrid& grid, const GhostSupport& s, int c) {
  double v = 0.0;
  for (int k = 0; k < s.count; ++k) {
    int x = s.pos[k].x, y = s.pos[k].y;
    if (!grid.wrap_x(x)) continue;  // dirichlet: reads 0
    v += s.lambda[k] * grid.at(x, y, c);
  }
  return v;
}

}  // namespace shellfill
