#pragma once

#include <array>
#include <cmath>
#include <numbers>

namespace fockspec {

/// A point of T^3 (or R^3), stored as three coordinates.
using Point3 = std::array<double, 3>;

inline Point3 operator+(const Point3& a, const Point3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Point3 operator-(const Point3& a, const Point3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Point3 operator-(const Point3& a) { return {-a[0], -a[1], -a[2]}; }
inline Point3 operator*(double s, const Point3& a) { return {s * a[0], s * a[1], s * a[2]}; }

inline double dot(const Point3& a, const Point3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm2(const Point3& a) { return dot(a, a); }
inline double norm(const Point3& a) { return std::sqrt(norm2(a)); }

/// Maps x into (-pi, pi].
inline double wrap_to_torus(double x) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double y = std::fmod(x + std::numbers::pi, two_pi);
  if (y <= 0.0) y += two_pi;
  return y - std::numbers::pi;
}

inline Point3 wrap_to_torus(const Point3& p) { return {wrap_to_torus(p[0]), wrap_to_torus(p[1]), wrap_to_torus(p[2])}; }

}  // namespace fockspec
