#pragma once
/**
 * @file vec.hpp
 * @brief Plane vectors and 2x2 matrices used throughout unisphere.
 *
 * Vec2 is a plain aggregate with value semantics. Mat2 is a general 2x2
 * matrix stored row-major; symmetric matrices are just Mat2 with b == c.
 */

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

namespace unisphere {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Vec2 {
  double x{0.0};
  double y{0.0};

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
  constexpr bool operator==(const Vec2&) const = default;
};

constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }

/// z-component of the 3-D cross product; positive when b is counterclockwise of a.
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

inline double norm_e(Vec2 v) { return std::hypot(v.x, v.y); }

inline bool is_finite(Vec2 v) { return std::isfinite(v.x) && std::isfinite(v.y); }

/// Unit vector at angle theta.
inline Vec2 unit_direction(double theta) { return {std::cos(theta), std::sin(theta)}; }

/// Counterclockwise quarter turn.
constexpr Vec2 rotate_ccw(Vec2 v) { return {-v.y, v.x}; }

/// Row-major 2x2 matrix [[a, b], [c, d]].
struct Mat2 {
  double a{1.0}, b{0.0}, c{0.0}, d{1.0};

  static constexpr Mat2 identity() { return {}; }
  static constexpr Mat2 diag(double p, double q) { return {p, 0.0, 0.0, q}; }
  static constexpr Mat2 symmetric(double a, double b, double d) { return {a, b, b, d}; }

  constexpr Vec2 operator*(Vec2 v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
  constexpr Mat2 operator*(const Mat2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }
  constexpr Mat2 operator*(double s) const { return {a * s, b * s, c * s, d * s}; }
  constexpr Mat2 operator+(const Mat2& o) const { return {a + o.a, b + o.b, c + o.c, d + o.d}; }
  constexpr Mat2 operator-(const Mat2& o) const { return {a - o.a, b - o.b, c - o.c, d - o.d}; }
  constexpr bool operator==(const Mat2&) const = default;

  constexpr double det() const { return a * d - b * c; }
  constexpr double trace() const { return a + d; }
  constexpr Mat2 transpose() const { return {a, c, b, d}; }
  /// Caller guarantees det() != 0.
  constexpr Mat2 inverse() const {
    const double k = 1.0 / det();
    return {d * k, -b * k, -c * k, a * k};
  }
  double max_abs_entry() const {
    return std::max(std::max(std::abs(a), std::abs(b)), std::max(std::abs(c), std::abs(d)));
  }
};

/// Eigenvalues (ascending) of a symmetric matrix, using only its upper triangle.
inline std::pair<double, double> symmetric_eigenvalues(const Mat2& m) {
  const double mean = 0.5 * (m.a + m.d);
  const double radius = std::hypot(0.5 * (m.a - m.d), m.b);
  return {mean - radius, mean + radius};
}

/// Lower-triangular C with C * C^T == m, for symmetric positive-definite m.
inline Mat2 cholesky(const Mat2& m) {
  const double l11 = std::sqrt(m.a);
  const double l21 = m.c / l11;
  const double l22 = std::sqrt(m.d - l21 * l21);
  return {l11, 0.0, l21, l22};
}

/// Points of R^n for ambient norms.
using VecN = std::vector<double>;

inline double dot(const VecN& a, const VecN& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace unisphere
