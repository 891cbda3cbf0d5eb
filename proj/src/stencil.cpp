#include "shellfill/stencil.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace shellfill {

double Stencil::total_weight() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

double EquivalentStencil::total_weight() const {
  double s = origin_weight;
  for (double w : weights) s += w;
  return s;
}

std::vector<Vec2> make_neighborhood(NeighborhoodKind kind, int r, Vec2 g) {
  if (r < 1) throw std::invalid_argument("make_neighborhood: r must be >= 1");
  std::vector<Vec2> out;
  switch (kind) {
    case NeighborhoodKind::ball:
      for (int m = -r; m <= r; ++m)
        for (int n = -r; n <= r; ++n) {
          int q = n * n + m * m;
          if (q > 0 && q <= r * r) out.push_back({double(n), double(m)});
        }
      break;
    case NeighborhoodKind::rotated_ball: {
      if (g.norm2() == 0.0) return make_neighborhood(NeighborhoodKind::ball, r, g);
      Vec2 gh = g.normalized();
      Vec2 gp = gh.perp();
      for (int m = -r; m <= r; ++m)
        for (int n = -r; n <= r; ++n) {
          int q = n * n + m * m;
          if (q > 0 && q <= r * r) {
            Vec2 p = n * gh + m * gp;
            out.push_back({snap_to_int(p.x), snap_to_int(p.y)});
          }
        }
      break;
    }
    case NeighborhoodKind::box:
      for (int m = -r; m <= r; ++m)
        for (int n = -r; n <= r; ++n)
          if (n != 0 || m != 0) out.push_back({double(n), double(m)});
      break;
  }
  return out;
}

std::vector<Vec2> restrict_half_plane(const std::vector<Vec2>& offsets,
                                      int level) {
  std::vector<Vec2> out;
  out.reserve(offsets.size());
  for (const auto& p : offsets)
    if (p.y <= double(level) + 1e-12) out.push_back(p);
  return out;
}

Stencil eval_weights(Method scheme, const std::vector<Vec2>& offsets, Vec2 g,
                     double mu, int r) {
  Stencil s;
  s.radius_r = r;
  s.tag = scheme;
  if (scheme == Method::telea)
    throw std::invalid_argument(
        "eval_weights: telea weights depend on the distance transform and are "
        "built inside fill_telea");
  if (offsets.empty())
    throw std::domain_error("eval_weights: empty neighborhood");

  // exponents first, shifted by the minimum so the mu->infinity survivors
  // stay O(1) instead of underflowing
  std::vector<double> expo(offsets.size());
  if (scheme == Method::box_gaussian) {
    for (size_t i = 0; i < offsets.size(); ++i) {
      Vec2 d = offsets[i] / double(r) + Vec2{0.5, 0.5};
      expo[i] = 5.0 * d.norm2();
    }
  } else {
    Vec2 gp = g.normalized().perp();
    double c = mu * mu / (2.0 * double(r) * double(r));
    for (size_t i = 0; i < offsets.size(); ++i) {
      double t = gp.dot(offsets[i]);
      expo[i] = c * t * t;
    }
  }
  double emin = *std::min_element(expo.begin(), expo.end());
  for (size_t i = 0; i < offsets.size(); ++i) {
    const Vec2& d = offsets[i];
    if (d.norm2() == 0.0)
      throw std::invalid_argument("eval_weights: origin offset not allowed");
    double w = std::exp(-(expo[i] - emin));
    if (scheme != Method::box_gaussian) w /= d.norm();
    if (w > 0.0) {
      s.offsets.push_back(d);
      s.weights.push_back(w);
    }
  }
  if (s.offsets.empty() || s.total_weight() <= 0.0)
    throw std::domain_error("eval_weights: degenerate stencil (zero mass)");
  return s;
}

EquivalentStencil equivalent(const Stencil& stencil) {
  std::map<IVec2, double> acc;
  for (size_t i = 0; i < stencil.size(); ++i) {
    Vec2 p{snap_to_int(stencil.offsets[i].x), snap_to_int(stencil.offsets[i].y)};
    double w = stencil.weights[i];
    double fx = p.x - std::floor(p.x);
    double fy = p.y - std::floor(p.y);
    int x0 = int(std::floor(p.x));
    int y0 = int(std::floor(p.y));
    const double cw[4] = {(1 - fx) * (1 - fy), fx * (1 - fy), (1 - fx) * fy,
                          fx * fy};
    const IVec2 cp[4] = {{x0, y0}, {x0 + 1, y0}, {x0, y0 + 1}, {x0 + 1, y0 + 1}};
    for (int k = 0; k < 4; ++k)
      if (cw[k] > 0.0) acc[cp[k]] += w * cw[k];
  }
  EquivalentStencil eq;
  eq.radius_r = stencil.radius_r;
  for (const auto& [off, w] : acc) {
    if (w == 0.0) continue;
    if (off.x == 0 && off.y == 0) {
      eq.origin_weight += w;
    } else {
      eq.offsets.push_back(off);
      eq.weights.push_back(w);
    }
  }
  return eq;
}

Vec2 center_of_mass(const Stencil& stencil) {
  double W = 0.0;
  Vec2 m{0, 0};
  for (size_t i = 0; i < stencil.size(); ++i) {
    W += stencil.weights[i];
    m = m + stencil.weights[i] * stencil.offsets[i];
  }
  if (W <= 0.0) throw std::domain_error("center_of_mass: zero total weight");
  return m / W;
}

Vec2 center_of_mass(const EquivalentStencil& stencil) {
  double W = stencil.origin_weight;  // contributes mass, not moment
  Vec2 m{0, 0};
  for (size_t i = 0; i < stencil.offsets.size(); ++i) {
    W += stencil.weights[i];
    m.x += stencil.weights[i] * stencil.offsets[i].x;
    m.y += stencil.weights[i] * stencil.offsets[i].y;
  }
  if (W <= 0.0) throw std::domain_error("center_of_mass: zero total weight");
  return m / W;
}

Stencil make_stencil(Method method, int r, double mu, Vec2 g) {
  switch (method) {
    case Method::coherence_transport:
      return eval_weights(method,
                          restrict_half_plane(
                              make_neighborhood(NeighborhoodKind::ball, r, g), -1),
                          g, mu, r);
    case Method::guidefill:
      return eval_weights(
          method,
          restrict_half_plane(
              make_neighborhood(NeighborhoodKind::rotated_ball, r, g), -1),
          g, mu, r);
    case Method::guidefill_semi_implicit:
      return eval_weights(
          method,
          restrict_half_plane(
              make_neighborhood(NeighborhoodKind::rotated_ball, r, g), 0),
          g, mu, r);
    case Method::box_gaussian:
      return eval_weights(method,
                          restrict_half_plane(
                              make_neighborhood(NeighborhoodKind::box, r, g), -1),
                          g, mu, r);
    case Method::telea:
      throw std::invalid_argument("make_stencil: telea has no symmetric stencil");
  }
  throw std::logic_error("make_stencil: unknown method");
}

namespace {
std::string csv_row(double dx, double dy, double w) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", dx, dy, w);
  return buf;
}
}  // namespace

std::string dump_csv(const Stencil& s) {
  std::string out = "dx,dy,weight\n";
  for (size_t i = 0; i < s.size(); ++i)
    out += csv_row(s.offsets[i].x, s.offsets[i].y, s.weights[i]);
  return out;
}

std::string dump_csv(const EquivalentStencil& s) {
  std::string out = "dx,dy,weight\n";
  if (s.origin_weight > 0.0) out += csv_row(0, 0, s.origin_weight);
  for (size_t i = 0; i < s.offsets.size(); ++i)
    out += csv_row(s.offsets[i].x, s.offsets[i].y, s.weights[i]);
  return out;
}

}  // namespace shellfill
