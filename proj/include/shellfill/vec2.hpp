#pragma once

#include <cmath>

namespace shellfill {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 operator/(double s) const { return {x / s, y / s}; }
  Vec2 operator-() const { return {-x, -y}; }

  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double norm2() const { return x * x + y * y; }
  double norm() const { return std::sqrt(norm2()); }

  // counterclockwise rotation by 90 degrees
  Vec2 perp() const { return {-y, x}; }

  Vec2 normalized() const {
    double n = norm();
    return n > 0 ? Vec2{x / n, y / n} : Vec2{0, 0};
  }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

inline constexpr double kPi = 3.14159265358979323846;

/// Angle of the line through the origin parallel to v, in [0, pi).
inline double theta_mod_pi(const Vec2& v) {
  double a = std::atan2(v.y, v.x);
  if (a < 0) a += kPi;
  if (a >= kPi) a -= kPi;
  return a;
}

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

/// Snaps values within tol of an integer onto that integer.
/// Rotated neighborhoods hit lattice points only up to floating error;
/// without snapping those points would leak mass to phantom neighbors.
inline double snap_to_int(double v, double tol = 1e-9) {
  double r = std::round(v);
  return std::abs(v - r) <= tol ? r : v;
}

struct IVec2 {
  int x = 0;
  int y = 0;
  bool operator==(const IVec2& o) const { return x == o.x && y == o.y; }
  bool operator<(const IVec2& o) const { return y != o.y ? y < o.y : x < o.x; }
};

}  // namespace shellfill
