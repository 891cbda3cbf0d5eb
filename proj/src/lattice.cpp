#include "shellfill/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace shellfill {

namespace {

// True if (x,y) has at least one known 9-neighbor under the state's rules.
bool touches_known(const FillState& s, int x, int y) {
  for (int dy = -1; dy <= 1; ++dy) {
    for (int dx = -1; dx <= 1; ++dx) {
      if (dx == 0 && dy == 0) continue;
      int nx = x + dx, ny = y + dy;
      if (ny < 0 || ny >= s.height) continue;  // off-image rows: never known
      if (nx < 0 || nx >= s.width) {
        if (s.boundary_mode == BoundaryMode::periodic_x) {
          nx = (nx + s.width) % s.width;
        } else {
          continue;  // dirichlet columns hold value 0 but do not seed shells
        }
      }
      if (s.status[s.idx(nx, ny)] == PixelStatus::known) return true;
    }
  }
  return false;
}

}  // namespace

void FillState::refresh_active() {
  // demote all active back to unfilled, then re-test
  for (auto& st : status)
    if (st == PixelStatus::active) st = PixelStatus::unfilled;
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      if (status[idx(x, y)] == PixelStatus::unfilled && touches_known(*this, x, y))
        status[idx(x, y)] = PixelStatus::active;
}

FillState state_from_mask(const PixelGrid& mask) {
  FillState s(mask.width, mask.height, mask.boundary_mode);
  for (int y = 0; y < mask.height; ++y)
    for (int x = 0; x < mask.width; ++x)
      if (mask.at(x, y, 0) >= 0.5) s.set_unfilled(x, y);
  s.refresh_active();
  return s;
}

std::vector<IVec2> inner_boundary(const FillState& state) {
  std::vector<IVec2> out;
  for (int y = 0; y < state.height; ++y)
    for (int x = 0; x < state.width; ++x) {
      PixelStatus st = state.status[state.idx(x, y)];
      if (st != PixelStatus::known && touches_known(state, x, y))
        out.push_back({x, y});
    }
  return out;
}

std::vector<IVec2> dilate(const std::vector<IVec2>& pixels) {
  std::set<IVec2> acc;
  for (const auto& p : pixels)
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) acc.insert({p.x + dx, p.y + dy});
  return {acc.begin(), acc.end()};
}

double lp_norm(const std::vector<double>& field, double p, double spacing_h) {
  if (field.empty()) return 0.0;
  if (p < 1.0) throw std::invalid_argument("lp_norm: p must be >= 1");
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : field) m = std::max(m, std::abs(v));
    return m;
  }
  // compensated summation; rate experiments difference nearly-equal norms
  double sum = 0.0, comp = 0.0;
  const double cell = spacing_h * spacing_h;
  for (double v : field) {
    double term = std::pow(std::abs(v), p) * cell - comp;
    double t = sum + term;
    comp = (t - sum) - term;
    sum = t;
  }
  return std::pow(sum, 1.0 / p);
}

void advance(FillState& state, const std::vector<IVec2>& filled) {
  for (const auto& p : filled)
    if (state.status[state.idx(p.x, p.y)] != PixelStatus::active)
      throw std::invalid_argument("advance: filled set not within active set");
  if (filled.empty() && state.unfilled_count > 0)
    throw std::runtime_error("advance: empty fill with nonempty active set");
  for (const auto& p : filled) {
    state.status[state.idx(p.x, p.y)] = PixelStatus::known;
    --state.unfilled_count;
  }
  ++state.shell_index;
  state.refresh_active();
}

}  // namespace shellfill
