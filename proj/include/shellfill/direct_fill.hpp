#pragma once

#include <functional>
#include <optional>
#include <stdexcept>

#include "shellfill/fill_policy.hpp"
#include "shellfill/lattice.hpp"
#include "shellfill/stencil.hpp"

namespace shellfill {

/// Thrown when a shell produces no fillable pixel and fallback is disabled.
struct FillStall : std::runtime_error {
  int shell;
  explicit FillStall(int k)
      : std::runtime_error("fill stalled at shell " + std::to_string(k)),
        shell(k) {}
};

enum class SolverKind { direct, jacobi, sor };

struct FillConfig {
  Method method = Method::coherence_transport;
  int r = 3;
  double mu = 50.0;
  Vec2 guide{0.0, 1.0};
  // spatially varying guide field, sampled at pixel indices; overrides
  // `guide` when set
  std::function<Vec2(int, int)> guide_field;
  ReadyConfig ready;
  // semi-implicit solver settings
  SolverKind solver = SolverKind::direct;
  double omega = 0.0;  // <= 0 selects omega*
  int sweeps = 5;
  double solve_tol = 0.0;  // > 0: iterate until the residual drops below it
  bool stall_fallback = true;  // fall back to onion order on an empty ready set
  bool telea_clamp = true;
  double telea_d0 = 1.0;  // dst reference distance, pixels
  double telea_t0 = 1.0;  // lev reference level
};

struct FillStats {
  int shells = 0;
  int stall_fallbacks = 0;
  long pixels_filled = 0;
  double wall_seconds = 0.0;
  int max_sweeps = 0;
  double worst_residual = 0.0;
};

/// Direct form of the shell fill (Algorithm 1 without the implicit loop):
/// each ready pixel becomes the weighted average of its usable neighbors,
/// reading only previously completed shells.
PixelGrid fill(const PixelGrid& image, FillState state, const FillConfig& cfg,
               FillStats* stats = nullptr, int threads = 0);

/// Telea variant: weighted average of linear-extrapolation predictions with
/// dir*dst*lev weights driven by the distance transform.
PixelGrid fill_telea(const PixelGrid& image, FillState state,
                     const FillConfig& cfg, FillStats* stats = nullptr,
                     int threads = 0);

}  // namespace shellfill
