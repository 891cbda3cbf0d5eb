#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "shellfill/vec2.hpp"

namespace shellfill {

enum class BoundaryMode { periodic_x, dirichlet_x };

/// Multi-channel scalar field on a square lattice. Row 0 is the bottom of
/// the image; y increases upward. Values live in [0,1] for image data.
struct PixelGrid {
  int width = 0;
  int height = 0;
  int channels = 1;
  double spacing_h = 1.0;
  BoundaryMode boundary_mode = BoundaryMode::periodic_x;
  std::vector<double> data;  // ((y*width)+x)*channels + c

  PixelGrid() = default;
  PixelGrid(int w, int h, int c, double spacing = 1.0,
            BoundaryMode mode = BoundaryMode::periodic_x)
      : width(w), height(h), channels(c), spacing_h(spacing),
        boundary_mode(mode), data(static_cast<size_t>(w) * h * c, 0.0) {
    if (w <= 0 || h <= 0 || (c != 1 && c != 3) || spacing <= 0)
      throw std::invalid_argument("PixelGrid: bad dimensions");
  }

  size_t idx(int x, int y, int c = 0) const {
    return (static_cast<size_t>(y) * width + x) * channels + c;
  }
  double& at(int x, int y, int c = 0) { return data[idx(x, y, c)]; }
  double at(int x, int y, int c = 0) const { return data[idx(x, y, c)]; }

  bool in_range(int x, int y) const {
    return x >= 0 && x < width && y >= 0 && y < height;
  }

  /// Wraps x for periodic mode; returns false if the column is unusable
  /// (dirichlet out-of-range reads are handled by the caller).
  bool wrap_x(int& x) const {
    if (x >= 0 && x < width) return true;
    if (boundary_mode == BoundaryMode::periodic_x) {
      x %= width;
      if (x < 0) x += width;
      return true;
    }
    return false;
  }
};

enum class PixelStatus : uint8_t { known = 0, unfilled = 1, active = 2 };

/// Fill bookkeeping: which pixels are known / unfilled / on the active shell,
/// plus the shell counter k.
struct FillState {
  int width = 0;
  int height = 0;
  BoundaryMode boundary_mode = BoundaryMode::periodic_x;
  std::vector<PixelStatus> status;
  int shell_index = 0;
  long unfilled_count = 0;

  FillState() = default;
  FillState(int w, int h, BoundaryMode mode = BoundaryMode::periodic_x)
      : width(w), height(h), boundary_mode(mode),
        status(static_cast<size_t>(w) * h, PixelStatus::known) {}

  size_t idx(int x, int y) const { return static_cast<size_t>(y) * width + x; }
  PixelStatus at(int x, int y) const { return status[idx(x, y)]; }

  bool known(int x, int y) const {
    if (y < 0 || y >= height) return false;  // off-image rows never count
    if (x < 0 || x >= width) {
      if (boundary_mode == BoundaryMode::periodic_x) {
        x %= width;
        if (x < 0) x += width;
      } else {
        return false;
      }
    }
    return status[idx(x, y)] == PixelStatus::known;
  }

  /// Marks a pixel unfilled. Call refresh_active() once the mask is complete.
  void set_unfilled(int x, int y) {
    if (status[idx(x, y)] == PixelStatus::known) {
      status[idx(x, y)] = PixelStatus::unfilled;
      ++unfilled_count;
    }
  }

  std::vector<IVec2> active_pixels() const {
    std::vector<IVec2> out;
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x)
        if (status[idx(x, y)] == PixelStatus::active) out.push_back({x, y});
    return out;
  }

  /// Recomputes the active set as the inner boundary of the unfilled set.
  void refresh_active();
};

/// Builds a FillState from a mask grid: mask value >= 0.5 means unfilled.
FillState state_from_mask(const PixelGrid& mask);

/// Discrete inner boundary: unfilled pixels with at least one known pixel in
/// their 9-point neighborhood. Off-image rows never count as known; x wraps
/// in periodic mode and counts as known (value 0) in dirichlet mode only if
/// `dirichlet_x_known` is set by the caller via the state's boundary mode.
std::vector<IVec2> inner_boundary(const FillState& state);

/// Union of 9-point neighborhoods.
std::vector<IVec2> dilate(const std::vector<IVec2>& pixels);

/// Discrete L^p norm: (sum |f|^p h^2)^(1/p), or max |f| for p = infinity.
/// Pass p = std::numeric_limits<double>::infinity() for the sup norm.
double lp_norm(const std::vector<double>& field, double p, double spacing_h);

/// Marks `filled` (a subset of the active set) as known, increments the shell
/// counter and recomputes the active set. Throws if filled is not a subset of
/// the active set (stall guard lives in the fill drivers).
void advance(FillState& state, const std::vector<IVec2>& filled);

}  // namespace shellfill
