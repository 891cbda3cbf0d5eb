#include "shellfill/direct_fill.hpp"

#include <chrono>
#include <cmath>
#include <mutex>
#include <unordered_map>

#include "shellfill/ghost.hpp"
#include "shellfill/parallel.hpp"
#include "shellfill/stencil_cache.hpp"

namespace shellfill {

namespace {

Vec2 guide_at(const FillConfig& cfg, int x, int y) {
  return cfg.guide_field ? cfg.guide_field(x, y) : cfg.guide;
}

std::vector<IVec2> ready_set(const std::vector<IVec2>& active,
                             const FillState& state, const FillConfig& cfg,
                             StencilCache& cache, bool allow_coupled) {
  switch (cfg.ready.policy) {
    case ReadyPolicy::onion:
      return active;
    case ReadyPolicy::confidence: {
      std::vector<IVec2> out;
      for (const auto& p : active) {
        const Stencil& st = cache.get(guide_at(cfg, p.x, p.y));
        if (confidence(p, state, st) > cfg.ready.threshold_c) out.push_back(p);
      }
      return out;
    }
    case ReadyPolicy::coupled: {
      if (!allow_coupled)
        throw std::invalid_argument(
            "coupled readiness applies to the semi-implicit fill");
      // caller handles coupled readiness
      return active;
    }
  }
  return active;
}

}  // namespace

PixelGrid fill(const PixelGrid& image, FillState state, const FillConfig& cfg,
               FillStats* stats, int threads) {
  if (cfg.ready.policy != ReadyPolicy::onion &&
      (cfg.ready.threshold_c <= 0.0 || cfg.ready.threshold_c >= 1.0))
    throw std::invalid_argument("fill: threshold_c must lie in (0,1)");
  auto t0 = std::chrono::steady_clock::now();
  PixelGrid out = image;
  for (int y = 0; y < state.height; ++y)
    for (int x = 0; x < state.width; ++x)
      if (state.at(x, y) != PixelStatus::known)
        for (int c = 0; c < out.channels; ++c) out.at(x, y, c) = 0.0;

  StencilCache cache(cfg.method, cfg.r, cfg.mu);
  FillStats st;
  const int C = out.channels;

  while (state.unfilled_count > 0) {
    std::vector<IVec2> active = state.active_pixels();
    if (active.empty()) throw FillStall(state.shell_index);
    std::vector<IVec2> ready = ready_set(active, state, cfg, cache, false);
    if (ready.empty()) {
      if (!cfg.stall_fallback) throw FillStall(state.shell_index);
      ready = active;  // onion fallback for this shell
      ++st.stall_fallbacks;
    }

    std::vector<double> vals(ready.size() * C, 0.0);
    std::vector<uint8_t> ok(ready.size(), 0);
    parallel_for(
        ready.size(),
        [&](size_t i) {
          const IVec2 p = ready[i];
          const Stencil& sten = cache.get(guide_at(cfg, p.x, p.y));
          double wsum = 0.0;
          double* acc = &vals[i * C];
          for (size_t k = 0; k < sten.size(); ++k) {
            GhostSupport gs = ghost_support(p.x, p.y, sten.offsets[k]);
            if (!ghost_usable(state, gs)) continue;
            double w = sten.weights[k];
            wsum += w;
            for (int c = 0; c < C; ++c)
              acc[c] += w * ghost_value(out, gs, c);
          }
          if (wsum > 0.0) {
            ok[i] = 1;
            for (int c = 0; c < C; ++c) acc[c] /= wsum;
          }
        },
        threads);

    std::vector<IVec2> filled;
    for (size_t i = 0; i < ready.size(); ++i)
      if (ok[i]) {
        filled.push_back(ready[i]);
        for (int c = 0; c < C; ++c) out.at(ready[i].x, ready[i].y, c) = vals[i * C + c];
      }
    if (filled.empty()) throw FillStall(state.shell_index);
    st.pixels_filled += long(filled.size());
    advance(state, filled);
    ++st.shells;
  }

  st.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (stats) *stats = st;
  return out;
}

namespace {

// Central-difference gradient of a scalar field over known pixels only;
// falls back to one-sided differences beside the mask and at image edges.
Vec2 masked_gradient(const std::vector<double>& f, const FillState& s, int x,
                     int y) {
  auto value = [&](int xx, int yy, bool& have) {
    have = false;
    if (yy < 0 || yy >= s.height) return 0.0;
    if (xx < 0 || xx >= s.width) {
      if (s.boundary_mode != BoundaryMode::periodic_x) return 0.0;
      xx = (xx % s.width + s.width) % s.width;
    }
    have = true;
    return f[s.idx(xx, yy)];
  };
  bool hl, hr, hd, hu;
  double l = value(x - 1, y, hl), r = value(x + 1, y, hr);
  double d = value(x, y - 1, hd), u = value(x, y + 1, hu);
  double c = f[s.idx(x, y)];
  Vec2 g{0, 0};
  if (hl && hr)
    g.x = 0.5 * (r - l);
  else if (hr)
    g.x = r - c;
  else if (hl)
    g.x = c - l;
  if (hd && hu)
    g.y = 0.5 * (u - d);
  else if (hu)
    g.y = u - c;
  else if (hd)
    g.y = c - d;
  return g;
}

// Per-channel gradient of the image at a known pixel, using known neighbors.
Vec2 known_gradient(const PixelGrid& img, const FillState& s, int x, int y,
                    int c) {
  auto value = [&](int xx, int yy, bool& have) {
    have = false;
    if (yy < 0 || yy >= s.height) return 0.0;
    if (xx < 0 || xx >= s.width) {
      if (s.boundary_mode != BoundaryMode::periodic_x) return 0.0;
      xx = (xx % s.width + s.width) % s.width;
    }
    if (!s.known(xx, yy)) return 0.0;
    have = true;
    return img.at((xx % s.width + s.width) % s.width, yy, c);
  };
  bool hl, hr, hd, hu;
  double l = value(x - 1, y, hl), r = value(x + 1, y, hr);
  double d = value(x, y - 1, hd), u = value(x, y + 1, hu);
  double mid = img.at(x, y, c);
  Vec2 g{0, 0};
  if (hl && hr)
    g.x = 0.5 * (r - l);
  else if (hr)
    g.x = r - mid;
  else if (hl)
    g.x = mid - l;
  if (hd && hu)
    g.y = 0.5 * (u - d);
  else if (hu)
    g.y = u - mid;
  else if (hd)
    g.y = mid - d;
  return g;
}

}  // namespace

PixelGrid fill_telea(const PixelGrid& image, FillState state,
                     const FillConfig& cfg, FillStats* stats, int threads) {
  auto t0 = std::chrono::steady_clock::now();
  PixelGrid out = image;
  for (int y = 0; y < state.height; ++y)
    for (int x = 0; x < state.width; ++x)
      if (state.at(x, y) != PixelStatus::known)
        for (int c = 0; c < out.channels; ++c) out.at(x, y, c) = 0.0;

  // T is precomputed on the original mask, in pixel units
  std::vector<double> T = distance_transform(state, 1.0);
  const std::vector<Vec2> ball =
      make_neighborhood(NeighborhoodKind::ball, cfg.r, {0, 1});
  FillStats st;
  const int C = out.channels;

  while (state.unfilled_count > 0) {
    std::vector<IVec2> active = state.active_pixels();
    if (active.empty()) throw FillStall(state.shell_index);

    std::vector<double> vals(active.size() * C, 0.0);
    std::vector<uint8_t> ok(active.size(), 0);
    parallel_for(
        active.size(),
        [&](size_t i) {
          const IVec2 p = active[i];
          Vec2 N = masked_gradient(T, state, p.x, p.y);
          double nn = N.norm();
          if (nn > 0) N = N / nn;
          double wsum = 0.0;
          double* acc = &vals[i * C];
          for (const Vec2& dv : ball) {
            int dx = int(dv.x), dy = int(dv.y);
            int tx = p.x + dx, ty = p.y + dy;
            if (!state.known(tx, ty)) continue;
            int rx = tx;
            if (!out.wrap_x(rx)) continue;
            double dist = dv.norm();
            double dir = (-dv.x * N.x - dv.y * N.y) / dist;
            double dst = cfg.telea_d0 * cfg.telea_d0 / (dist * dist);
            double lev =
                cfg.telea_t0 /
                (1.0 + std::abs(T[state.idx(rx, ty)] - T[state.idx(p.x, p.y)]));
            double w = dir * dst * lev;
            wsum += w;
            for (int c = 0; c < C; ++c) {
              Vec2 grad = known_gradient(out, state, rx, ty, c);
              double pred = out.at(rx, ty, c) + grad.x * (-dv.x) + grad.y * (-dv.y);
              acc[c] += w * pred;
            }
          }
          if (std::abs(wsum) > 1e-300) {
            ok[i] = 1;
            for (int c = 0; c < C; ++c) {
              double v = acc[c] / wsum;
              if (cfg.telea_clamp) v = std::clamp(v, 0.0, 1.0);
              acc[c] = v;
            }
          }
        },
        threads);

    std::vector<IVec2> filled;
    for (size_t i = 0; i < active.size(); ++i)
      if (ok[i]) {
        filled.push_back(active[i]);
        for (int c = 0; c < C; ++c)
          out.at(active[i].x, active[i].y, c) = vals[i * C + c];
      }
    if (filled.empty()) throw FillStall(state.shell_index);
    st.pixels_filled += long(filled.size());
    advance(state, filled);
    ++st.shells;
  }

  st.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (stats) *stats = st;
  return out;
}

}  // namespace shellfill
