#pragma once

#include <algorithm>
#include <cmath>

#include "shellfill/vec2.hpp"

namespace shellfill {
namespace testdata {

/// Truncated Weierstrass-type series sum_{n=1}^{n_max} 2^(-s n) cos(2^n pi x);
/// nowhere differentiable for 0 < s <= 1.
double weierstrass(double s, double x, int n_max);

/// Series cap so frequencies beyond the grid Nyquist (plus margin) are
/// dropped; capped at 48 to keep the cosine arguments meaningful.
inline int weierstrass_cap(double spacing_h) {
  int n = int(std::ceil(std::log2(1.0 / spacing_h))) + 4;
  return std::clamp(n, 1, 48);
}

/// Step component H_{s'}: 1 minus tanh ramps pinned at x = 1/4 and x = 3/4;
/// s' = 0 gives the sharp step via the tanh(0)^0 = 1 convention.
double step_h(double s_prime, double x);

/// The full boundary generator u0(x, y) = w_s(x) + H_{s'}(x); independent
/// of y.
inline double boundary_u0(double s, double s_prime, double x, int n_max) {
  return weierstrass(s, x, n_max) + step_h(s_prime, x);
}

/// Smoothly varying guide field g = (4xy / (1 + 2y^2), 1) and its exact
/// transport operator Pi(x, y) = (x / (1 + 2y^2), 0).
Vec2 smooth_guide(double x, double y);
double exact_transport(double x, double y);

}  // namespace testdata
}  // namespace shellfill
