#pragma once
// Independent reference computations for the tests. None of these reuse the
// library's evaluation paths: gauges come from bisection against a point-in-polygon
// predicate, lengths from brute-force dense polylines, and extremes from plain grids.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "unisphere/vec.hpp"

namespace oracle {

using unisphere::Vec2;

/// Point in a convex polygon given counterclockwise, boundary included.
inline bool inside_convex(const std::vector<Vec2>& ccw, Vec2 p) {
  for (std::size_t i = 0; i < ccw.size(); ++i) {
    const Vec2 a = ccw[i], b = ccw[(i + 1) % ccw.size()];
    if ((b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x) < -1e-15) return false;
  }
  return true;
}

/// Minkowski gauge inf{t > 0 : v / t in P} by bisection on t.
inline double polygon_gauge(const std::vector<Vec2>& ccw, Vec2 v) {
  if (v.x == 0.0 && v.y == 0.0) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (!inside_convex(ccw, {v.x / hi, v.y / hi})) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (inside_convex(ccw, {v.x / mid, v.y / mid})) hi = mid; else lo = mid;
  }
  return hi;
}

/// Textbook l_p formula without any rescaling.
inline double lp(double p, Vec2 v) {
  if (std::isinf(p)) return std::max(std::abs(v.x), std::abs(v.y));
  return std::pow(std::pow(std::abs(v.x), p) + std::pow(std::abs(v.y), p), 1.0 / p);
}

/// Length of the polyline through point(theta) on n uniform steps over [a, b].
inline double dense_length(const std::function<Vec2(double)>& point, const std::function<double(Vec2)>& norm,
                           double a, double b, std::size_t n) {
  double total = 0.0;
  Vec2 prev = point(a);
  for (std::size_t j = 1; j <= n; ++j) {
    const Vec2 q = point(a + (b - a) * double(j) / double(n));
    total += norm({q.x - prev.x, q.y - prev.y});
    prev = q;
  }
  return total;
}

/// Extremes of the Euclidean radius of the unit ball along (cos t, sin t): a uniform grid
/// over [0, pi), then a second uniform grid of the same size across the best cell pair, so
/// kinks at polygon corners are located to about (pi / n^2).
inline std::pair<double, double> radius_extremes(const std::function<double(Vec2)>& norm, std::size_t n) {
  auto radius = [&](double t) { return 1.0 / norm({std::cos(t), std::sin(t)}); };
  const double h = unisphere::kPi / double(n);
  double lo = 1e300, hi = 0.0, tlo = 0.0, thi = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = h * double(i), r = radius(t);
    if (r < lo) lo = r, tlo = t;
    if (r > hi) hi = r, thi = t;
  }
  for (std::size_t i = 0; i <= n; ++i) {
    const double s = -h + 2.0 * h * double(i) / double(n);
    lo = std::min(lo, radius(tlo + s));
    hi = std::max(hi, radius(thi + s));
  }
  return {lo, hi};
}

}  // namespace oracle
