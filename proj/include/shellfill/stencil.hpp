#pragma once

#include <map>
#include <string>
#include <vector>

#include "shellfill/vec2.hpp"

namespace shellfill {

enum class Method {
  coherence_transport,
  guidefill,
  guidefill_semi_implicit,
  telea,
  box_gaussian
};

enum class NeighborhoodKind { ball, rotated_ball, box };

/// Offsets are in pixel units and may be non-integer (ghost points).
/// The origin never appears; weights are finite, >= 0, and sum to > 0.
struct Stencil {
  std::vector<Vec2> offsets;
  std::vector<double> weights;
  int radius_r = 1;
  Method tag = Method::coherence_transport;

  double total_weight() const;
  size_t size() const { return offsets.size(); }
};

/// Lattice-aligned offsets with bilinearly redistributed weights. The origin
/// weight w~(0,0) is kept out of `offsets` in its own field.
struct EquivalentStencil {
  std::vector<IVec2> offsets;
  std::vector<double> weights;
  double origin_weight = 0.0;  // w~(0,0)
  int radius_r = 1;

  double total_weight() const;  // includes origin_weight
};

/// Neighborhood point sets, origin excluded.
///   ball:         integer (n,m), 0 < n^2+m^2 <= r^2
///   rotated_ball: n*g + m*g_perp over the same index set (g falls back to
///                 the plain ball when zero)
///   box:          {-r..r}^2 minus the origin
std::vector<Vec2> make_neighborhood(NeighborhoodKind kind, int r, Vec2 g);

/// Keeps offsets whose y component is <= level (level is 0 or -1).
std::vector<Vec2> restrict_half_plane(const std::vector<Vec2>& offsets,
                                      int level);

/// Weight evaluation in pixel units.
///   coherence_transport / guidefill / guidefill_semi_implicit:
///       w = (1/|d|) exp(-(mu^2/(2 r^2)) (g_perp . d)^2)
///   box_gaussian: w = exp(-5 | d/r + (1/2,1/2) |^2)
/// Exponents are shifted by their minimum before exponentiation so the
/// surviving terms of the mu -> infinity limit do not underflow. Offsets
/// whose weight underflows to zero are dropped.
Stencil eval_weights(Method scheme, const std::vector<Vec2>& offsets, Vec2 g,
                     double mu, int r);

/// Bilinear redistribution of ghost weights onto the lattice (explicit
/// formula w~(z) = sum_y Lambda_y(z) w(y)). Integer offsets pass through.
EquivalentStencil equivalent(const Stencil& stencil);

Vec2 center_of_mass(const Stencil& stencil);
Vec2 center_of_mass(const EquivalentStencil& stencil);

/// Convenience: the full stencil construction for one method/config.
/// delta = -1 for the direct form, 0 for the semi-implicit extension.
Stencil make_stencil(Method method, int r, double mu, Vec2 g);

/// Diagnostics dump: CSV rows `dx,dy,weight` with 17 significant digits.
std::string dump_csv(const Stencil& stencil);
std::string dump_csv(const EquivalentStencil& stencil);

}  // namespace shellfill
