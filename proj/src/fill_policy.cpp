#include "shellfill/fill_policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "shellfill/ghost.hpp"

namespace shellfill {

double confidence(IVec2 x, const FillState& state, const Stencil& full_stencil) {
  double total = 0.0, usable = 0.0;
  for (size_t i = 0; i < full_stencil.size(); ++i) {
    double w = full_stencil.weights[i];
    total += w;
    GhostSupport s = ghost_support(x.x, x.y, full_stencil.offsets[i]);
    if (ghost_usable(state, s)) usable += w;
  }
  if (total <= 0.0) throw std::domain_error("confidence: zero stencil mass");
  return usable / total;
}

std::vector<IVec2> coupled_ready(const std::vector<IVec2>& shell,
                                 const FillState& state,
                                 const Stencil& full_stencil,
                                 const ReadyConfig& cfg) {
  return coupled_ready(
      shell, state,
      [&](IVec2) -> const Stencil& { return full_stencil; }, cfg);
}

std::vector<IVec2> coupled_ready(
    const std::vector<IVec2>& shell, const FillState& state,
    const std::function<const Stencil&(IVec2)>& stencil_at,
    const ReadyConfig& cfg) {
  const size_t n = shell.size();
  std::vector<uint8_t> ready(n, 0);
  // index of each shell pixel for dC lookups
  std::vector<long> shell_index(size_t(state.width) * state.height, -1);
  for (size_t i = 0; i < n; ++i)
    shell_index[state.idx(shell[i].x, shell[i].y)] = long(i);

  auto shell_slot = [&](IVec2 p) -> long {
    if (p.y < 0 || p.y >= state.height) return -1;
    int x = p.x;
    if (x < 0 || x >= state.width) {
      if (state.boundary_mode != BoundaryMode::periodic_x) return -1;
      x = (x % state.width + state.width) % state.width;
    }
    return shell_index[state.idx(x, p.y)];
  };

  // C(x) is round-invariant; precompute it
  std::vector<double> base(n, 0.0);
  for (size_t i = 0; i < n; ++i)
    base[i] = confidence(shell[i], state, stencil_at(shell[i]));

  size_t count = 0;
  for (int round = 0; round < cfg.max_iterations; ++round) {
    std::vector<uint8_t> next = ready;
    for (size_t i = 0; i < n; ++i) {
      if (ready[i]) {
        continue;
      }
      const Stencil& sten = stencil_at(shell[i]);
      const double W = sten.total_weight();
      double dC = 0.0;
      for (size_t k = 0; k < sten.size(); ++k) {
        GhostSupport s = ghost_support(shell[i].x, shell[i].y, sten.offsets[k]);
        if (ghost_usable(state, s)) continue;  // already inside C(x)
        // a ghost counts toward dC iff every support is known or a ready
        // same-shell pixel
        bool ok = true;
        for (int j = 0; j < s.count && ok; ++j) {
          if (state.known(s.pos[j].x, s.pos[j].y)) continue;
          long slot = shell_slot(s.pos[j]);
          ok = slot >= 0 && ready[size_t(slot)];
        }
        if (ok) dC += sten.weights[k] / W;
      }
      if (base[i] + dC > cfg.threshold_c) next[i] = 1;
    }
    size_t new_count = size_t(std::count(next.begin(), next.end(), 1));
    ready = std::move(next);
    if (new_count == count) break;  // stopped growing
    count = new_count;
  }

  std::vector<IVec2> out;
  for (size_t i = 0; i < n; ++i)
    if (ready[i]) out.push_back(shell[i]);
  return out;
}

namespace {

// Felzenszwalb-Huttenlocher exact 1-D squared distance transform.
void edt_1d(const std::vector<double>& f, std::vector<double>& d) {
  const int n = int(f.size());
  d.assign(n, 0.0);
  std::vector<int> v(n);
  std::vector<double> z(n + 1);
  int k = 0;
  v[0] = 0;
  z[0] = -std::numeric_limits<double>::infinity();
  z[1] = std::numeric_limits<double>::infinity();
  for (int q = 1; q < n; ++q) {
    double s;
    while (true) {
      s = ((f[q] + double(q) * q) - (f[v[k]] + double(v[k]) * v[k])) /
          (2.0 * (q - v[k]));
      if (s <= z[k]) {
        --k;
      } else {
        break;
      }
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = std::numeric_limits<double>::infinity();
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    double dq = double(q) - v[k];
    d[q] = dq * dq + f[v[k]];
  }
}

}  // namespace

std::vector<double> distance_transform(const FillState& state,
                                       double spacing_h) {
  const int W = state.width, H = state.height;
  bool any_known = false;
  for (auto st : state.status) any_known = any_known || st == PixelStatus::known;
  if (!any_known)
    throw std::domain_error("distance_transform: all-unknown mask");

  // periodic mode: tile the mask 3x in x and keep the middle copy
  const bool per = state.boundary_mode == BoundaryMode::periodic_x;
  const int WX = per ? 3 * W : W;
  const double INF = 1e18;
  std::vector<double> g(size_t(WX) * H);
  for (int y = 0; y < H; ++y)
    for (int x = 0; x < WX; ++x) {
      int sx = per ? x % W : x;
      g[size_t(y) * WX + x] =
          state.status[state.idx(sx, y)] == PixelStatus::known ? 0.0 : INF;
    }

  std::vector<double> col(H), dcol(H), row(WX), drow(WX);
  for (int x = 0; x < WX; ++x) {
    for (int y = 0; y < H; ++y) col[y] = g[size_t(y) * WX + x];
    edt_1d(col, dcol);
    for (int y = 0; y < H; ++y) g[size_t(y) * WX + x] = dcol[y];
  }
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < WX; ++x) row[x] = g[size_t(y) * WX + x];
    edt_1d(row, drow);
    for (int x = 0; x < WX; ++x) g[size_t(y) * WX + x] = drow[x];
  }

  std::vector<double> T(size_t(W) * H);
  const int x0 = per ? W : 0;
  for (int y = 0; y < H; ++y)
    for (int x = 0; x < W; ++x)
      T[state.idx(x, y)] = std::sqrt(g[size_t(y) * WX + x0 + x]) * spacing_h;
  return T;
}

}  // namespace shellfill
