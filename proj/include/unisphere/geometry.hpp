#pragma once
/**
 * @file geometry.hpp
 * @brief Euclidean plane constructions relating a norm's unit sphere S_X to the unit circle S_E.
 *
 * For a point x with |x| >= 1 the two lines through x tangent to S_E touch it at
 *
 *     tau(x)  = a(x) + b(x),      tau2(x) = a(x) - b(x),
 *     a(x)    = x / |x|^2,        b(x)    = sqrt(1 - |x|^-2) * perp(x),
 *
 * where perp(x) is the unit normal to x on a chosen side. These are the
 * primitives the tangent-line, angle and projection checks in verify.hpp use.
 */

#include <algorithm>
#include <cmath>
#include <vector>

#include "errors.hpp"
#include "norms.hpp"
#include "numeric.hpp"
#include "vec.hpp"

namespace unisphere {

/// The ray {(1 - t) origin + t through : t >= 0}.
struct Ray {
  Vec2 origin;
  Vec2 through;

  Ray(Vec2 o, Vec2 t) : origin(o), through(t) {
    if (!(norm_e(t - o) > 1e-12)) throw DomainError("ray: through point coincides with origin");
  }
  Vec2 direction() const { return (through - origin) / norm_e(through - origin); }
};

/// Size of the angle at `vertex` between the rays towards y and z, in [0, pi].
inline double angle_between(Vec2 vertex, Vec2 y, Vec2 z) {
  const Vec2 dy = y - vertex, dz = z - vertex;
  const double ny = norm_e(dy), nz = norm_e(dz);
  if (ny == 0.0 || nz == 0.0) throw DomainError("angle_between: point coincides with the vertex");
  // Clamped: near-parallel rays drift just outside [-1, 1].
  return std::acos(std::clamp(dot(dy, dz) / (ny * nz), -1.0, 1.0));
}

inline double angle_between(const Ray& a, const Ray& b) {
  return std::acos(std::clamp(dot(a.direction(), b.direction()), -1.0, 1.0));
}

/// Unit vector orthogonal to x on the side of `toward`; counterclockwise on a tie.
inline Vec2 perp(Vec2 x, Vec2 toward) {
  const double n = norm_e(x);
  if (n == 0.0) throw DomainError("perp: zero vector");
  const Vec2 ccw = rotate_ccw(x / n);
  return dot(ccw, toward) < 0.0 ? -ccw : ccw;
}

/// x / |x|_E.
inline Vec2 radial_project(Vec2 x) {
  const double n = norm_e(x);
  if (n == 0.0) throw DomainError("radial_project: zero vector");
  return x / n;
}

struct TangentData {
  Vec2 x;
  Vec2 a;
  Vec2 b;
  Vec2 tau;   ///< tangent point on the side of the orientation reference
  Vec2 tau2;  ///< the other tangent point, reflection of tau across span{x}
};

inline constexpr double kTangentSlack = 1e-9;

/// Tangent points of S_E seen from x; requires |x|_E >= 1 - 1e-9.
inline TangentData tangent_points(Vec2 x, Vec2 orient_toward) {
  const double n2 = dot(x, x);
  const double n = std::sqrt(n2);
  if (!(n >= 1.0 - kTangentSlack)) throw DomainError("tangent_points: point lies inside the unit circle");
  if (n2 <= 1.0) return {x, x, {0.0, 0.0}, x, x};
  const Vec2 a = x / n2;
  const Vec2 b = std::sqrt(1.0 - 1.0 / n2) * perp(x, orient_toward);
  return {x, a, b, a + b, a - b};
}

inline constexpr double kGeneralPositionDet = 1e-12;

/// Whether the ray from x through y lies between the rays from x through v and through w.
inline bool ray_between(Vec2 x, Vec2 v, Vec2 w, Vec2 y) {
  const Vec2 dv = radial_project(v - x), dw = radial_project(w - x), dy = radial_project(y - x);
  if (std::abs(cross(dv, dw)) < kGeneralPositionDet) {
    // Not in general position: only the coincident-ray clause can hold.
    auto same = [](Vec2 p, Vec2 q) { return std::abs(cross(p, q)) < kGeneralPositionDet && dot(p, q) > 0.0; };
    return same(dv, dw) && same(dv, dy);
  }
  // x + s*(y - x) = v + t*(w - v), s >= 0, t in [0, 1]
  const Vec2 d = y - x, e = w - v, rhs = v - x;
  const double det = cross(d, e);
  if (std::abs(det) < kGeneralPositionDet * norm_e(d) * norm_e(e)) return false;
  const double s = cross(rhs, e) / det;
  const double t = cross(rhs, d) / det;
  constexpr double eps = 1e-12;
  return s >= -eps && t >= -eps && t <= 1.0 + eps;
}

namespace detail {

/// Contacts of a polygonal sphere with S_E, edge by edge: a tangential touch is the foot of
/// the perpendicular from the origin, a crossing is a root of |v + s d|_E = 1 with s in [0, 1].
inline std::vector<double> polygon_circle_contacts(const std::vector<Vec2>& verts, double value_tol) {
  std::vector<double> out;
  for (std::size_t i = 0; i < verts.size(); ++i) {
    const Vec2 v = verts[i], d = verts[(i + 1) % verts.size()] - v;
    const double a = dot(d, d), b = dot(v, d), c = dot(v, v) - 1.0;
    const double foot = -b / a;
    const double dist = norm_e(v + foot * d);
    if (std::abs(dist - 1.0) <= value_tol) {
      if (foot >= 0.0 && foot <= 1.0) out.push_back(numeric::wrap_angle(std::atan2((v + foot * d).y, (v + foot * d).x)));
      continue;
    }
    const double disc = b * b - a * c;
    if (disc <= 0.0) continue;
    for (double s : {(-b - std::sqrt(disc)) / a, (-b + std::sqrt(disc)) / a}) {
      if (s >= 0.0 && s <= 1.0) out.push_back(numeric::wrap_angle(std::atan2((v + s * d).y, (v + s * d).x)));
    }
  }
  return out;
}

}  // namespace detail

/// Polar angles in [0, 2pi) of the points of S_X that lie on S_E.
///
/// Polygonal spheres are handled exactly edge by edge. Otherwise contacts are located as sign changes of |sphere_point(theta)|_E - 1 (bisection)
/// and as local minima touching zero (golden section), since a normalized ball
/// typically only touches the circle without crossing it.
inline std::vector<double> sphere_circle_contacts(const NormSpec& spec, int resolution = 4096,
                                                  double value_tol = 1e-9) {
  auto finish = [](std::vector<double> out) {
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end(), [](double a, double b) { return b - a < 1e-10; }), out.end());
    if (out.size() > 1 && out.front() + kTwoPi - out.back() < 1e-10) out.pop_back();
    return out;
  };
  if (auto verts = spec.sphere_vertices()) return finish(detail::polygon_circle_contacts(*verts, value_tol));

  const double h = kTwoPi / resolution;
  auto f = [&](double t) { return 1.0 / spec(unit_direction(t)) - 1.0; };
  std::vector<double> vals(resolution);
  for (int i = 0; i < resolution; ++i) vals[i] = f(i * h);

  std::vector<double> out;
  for (int i = 0; i < resolution; ++i) {
    const double prev = vals[(i + resolution - 1) % resolution];
    const double cur = vals[i], next = vals[(i + 1) % resolution];
    if (std::abs(cur) <= 1e-12) {
      out.push_back(i * h);
    } else if ((cur < 0.0) != (next < 0.0) && std::abs(next) > 1e-12) {
      out.push_back(numeric::wrap_angle(numeric::bisect(f, i * h, (i + 1) * h, 1e-12)));
    } else if (cur <= prev && cur <= next && cur > 0.0) {
      const auto m = numeric::golden_section_min(f, (i - 1) * h, (i + 1) * h, 1e-12);
      if (std::abs(m.value) <= value_tol) out.push_back(numeric::wrap_angle(m.arg));
    }
  }
  return finish(std::move(out));
}

}  // namespace unisphere
