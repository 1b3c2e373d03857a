#pragma once

#include <array>
#include <cmath>
#include <numbers>

#include "md2d/error.hpp"

namespace md2d {

inline constexpr double kPi = std::numbers::pi;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr Vec2 operator*(double s) const { return {s * x, s * y}; }
  constexpr double operator[](int i) const { return i == 0 ? x : y; }
};

inline constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }
inline constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline Vec2 unit_vector(double phi) { return {std::cos(phi), std::sin(phi)}; }

/// @brief Angle in [0, pi] between nonzero vectors, via atan2(|a x b|, a.b).
inline double angle(Vec2 a, Vec2 b) {
  if ((a.x == 0.0 && a.y == 0.0) || (b.x == 0.0 && b.y == 0.0))
    throw ConstraintViolation("angle: zero vector has no direction");
  return std::atan2(std::abs(cross(a, b)), dot(a, b));
}

/// Japanese bracket <r> = (1 + r^2)^{1/2}.
inline double jbracket(double r) { return std::sqrt(1.0 + r * r); }

}  // namespace md2d
