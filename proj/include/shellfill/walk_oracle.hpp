#pragma once

#include <cstdint>
#include <functional>
#include <map>

#include "shellfill/stencil.hpp"
#include "shellfill/vec2.hpp"

namespace shellfill {
namespace walk {

enum class WalkMode { direct, semi_implicit };

/// Probability mass of the stopped walk X_tau over lattice positions with
/// y-index in [-(r+2), 0]. Positions are absolute lattice indices; x wraps
/// modulo x_period when a period is set.
struct WalkDensity {
  std::map<IVec2, double> masses;
  IVec2 start{0, 0};
  double residual_interior_mass = 0.0;

  double total_stopped() const {
    double s = 0.0;
    for (const auto& [p, m] : masses) s += m;
    return s;
  }
};

/// Exact first-passage density through y <= 0 of the walk with step density
/// P(Z = z) = w~(z) / W read off the equivalent stencil.
///   direct:        every step descends by >= 1 row; finite elimination.
///   semi_implicit: within-row mass (including the origin weight) is
///                  redistributed iteratively until the interior residual
///                  drops below tol.
/// x_period = 0 means an unbounded line (no wrap).
WalkDensity stopped_density(IVec2 start, const EquivalentStencil& eq,
                            WalkMode mode, double tol = 1e-14,
                            int x_period = 0);

/// E[u0(X_tau)]: mass-weighted average of the boundary data over the stopped
/// positions. `boundary` maps an absolute lattice position (y <= 0) to the
/// per-channel values; `out` receives `channels` values.
void expected_color(const WalkDensity& density,
                    const std::function<void(IVec2, double*)>& boundary,
                    int channels, double* out);

/// Seeded Monte-Carlo cross-check of stopped_density. Deterministic per seed;
/// samples are processed in fixed-size chunks with per-chunk derived seeds.
WalkDensity monte_carlo(IVec2 start, const EquivalentStencil& eq, long samples,
                        uint64_t seed, int x_period = 0);

/// Total variation distance between two densities on the same support.
double total_variation(const WalkDensity& a, const WalkDensity& b);

/// Density dump: CSV rows `dx,dy,mass` relative to the start position.
std::string dump_csv(const WalkDensity& density);

}  // namespace walk
}  // namespace shellfill
