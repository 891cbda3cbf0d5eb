#pragma once

#include <string>

#include "shellfill/lattice.hpp"

namespace shellfill {

/// 8-bit PNG -> grid with values mapped linearly to [0,1]. Gray images give
/// one channel, color images three (alpha is dropped). PNG rows are stored
/// top-down; grids keep row 0 at the bottom, so the image is flipped on the
/// way in and out.
PixelGrid read_png(const std::string& path);

void write_png(const std::string& path, const PixelGrid& grid);

/// Mask convention: value >= 0.5 means unfilled.
FillState read_mask_png(const std::string& path, BoundaryMode mode);

}  // namespace shellfill
