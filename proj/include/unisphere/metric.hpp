#pragma once
/**
 * @file metric.hpp
 * @brief Path length in a norm and the intrinsic metric of its unit sphere.
 *
 * In the plane the unit sphere S_X is a closed convex curve, and any path on
 * it between x and y covers one of the two boundary arcs. The intrinsic
 * distance is therefore the shorter of the two arc lengths, each measured in
 * ||.||_X along theta -> sphere_point(theta).
 *
 * Arc length is the supremum of inscribed polyline lengths. For polygonal
 * spheres it is computed exactly by walking the vertices; otherwise the theta
 * partition is refined dyadically. Every inscribed length is a lower bound, and
 * refinement stops once one doubling increases the length by less than
 * tol (relative). The reported upper value adds that last increase.
 */

#include <cmath>
#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "errors.hpp"
#include "norms.hpp"
#include "numeric.hpp"
#include "report.hpp"
#include "vec.hpp"

namespace unisphere {

enum class ArcChoice { ccw, cw };

inline const char* to_string(ArcChoice c) { return c == ArcChoice::ccw ? "ccw" : "cw"; }

struct DistanceResult {
  double value{0.0};
  double lower{0.0};
  double upper{0.0};
  std::size_t segments{0};
  ArcChoice arc_choice{ArcChoice::ccw};

  Json to_json() const {
    return Json{{"value", value}, {"lower", lower}, {"upper", upper}, {"segments", segments},
                {"arc_choice", to_string(arc_choice)}};
  }
};

/// Thrown when refinement hits the segment cap; carries the last bracket.
class ArcNotConverged : public std::runtime_error {
 public:
  explicit ArcNotConverged(DistanceResult last)
      : std::runtime_error("arc length did not converge within the segment cap"), last_(last) {}
  const DistanceResult& last() const noexcept { return last_; }

 private:
  DistanceResult last_;
};

inline constexpr double kDefaultArcTol = 1e-8;
inline constexpr std::size_t kDefaultSegmentCap = std::size_t{1} << 20;
inline constexpr double kSphereSlack = 1e-7;
/// Allowed ratio of the certified gap to tol * length when accepting convergence.
inline constexpr double kGapFactor = 16.0;

struct ArcOptions {
  double tol{kDefaultArcTol};
  std::size_t max_segments{kDefaultSegmentCap};
  /// Walk polygon vertices exactly instead of refining, when the sphere is a known polygon.
  bool exact_polygons{true};
};

/// Ordered points; when on_sphere, every point has X-norm 1 within 1e-7.
class PolylinePath {
 public:
  explicit PolylinePath(std::vector<Vec2> points) : points_(std::move(points)) {
    if (points_.size() < 2) throw PreconditionError("polyline needs at least two points");
  }
  static PolylinePath on_sphere_of(const NormSpec& spec, std::vector<Vec2> points) {
    for (const auto& p : points)
      if (std::abs(spec(p) - 1.0) > kSphereSlack) throw DomainError("polyline point is not on the unit sphere");
    PolylinePath path(std::move(points));
    path.on_sphere_ = true;
    return path;
  }
  const std::vector<Vec2>& points() const { return points_; }
  bool on_sphere() const { return on_sphere_; }

 private:
  std::vector<Vec2> points_;
  bool on_sphere_{false};
};

inline double polyline_length(const NormSpec& spec, const PolylinePath& path) {
  const auto& pts = path.points();
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) total += spec(pts[i + 1] - pts[i]);
  return total;
}

/// Polar angle of v in [0, 2pi).
inline double angle_of(Vec2 v) {
  if (v.x == 0.0 && v.y == 0.0) throw DomainError("angle_of: zero vector");
  return numeric::wrap_angle(std::atan2(v.y, v.x));
}

namespace detail {

inline DistanceResult vertex_walk(const NormSpec& spec, const std::vector<Vec2>& vertices, double theta_a,
                                  double span) {
  std::vector<std::pair<double, Vec2>> inner;
  for (const auto& v : vertices) {
    const double rel = numeric::wrap_angle(angle_of(v) - theta_a);
    if (rel > 0.0 && rel < span) inner.emplace_back(rel, v);
  }
  std::sort(inner.begin(), inner.end(), [](const auto& p, const auto& q) { return p.first < q.first; });
  Vec2 prev = sphere_point(spec, theta_a);
  double total = 0.0;
  for (const auto& [rel, v] : inner) {
    total += spec(v - prev);
    prev = v;
  }
  total += spec(sphere_point(spec, theta_a + span) - prev);
  return {total, total, total, inner.size() + 1, ArcChoice::ccw};
}

/// Initial partition density: at least this many cells per full turn.
inline constexpr double kInitialCellAngle = kPi / 256.0;

/// Certified excess of the arc over its chord in the cell [p, q], given the neighbouring
/// points prev (before p) and next (after q) and the norms of the neighbouring chords.
///
/// On a convex curve the arc from p to q lies in the triangle cut off by the chord pq and
/// the extensions of the chords prev-p and next-q, so the two legs to their intersection
/// bound it from above. Homogeneity turns the legs into multiples of the neighbour chord
/// lengths, so no further norm evaluations are needed. Returns infinity when the triangle
/// is not proper, which means the cells are still too coarse to certify anything.
inline double cell_gap(Vec2 prev, Vec2 p, Vec2 q, Vec2 next, double len_prev, double len, double len_next) {
  const Vec2 d1 = p - prev, d2 = q - next, w = q - p;
  const double scale = std::max({std::abs(p.x), std::abs(p.y), std::abs(q.x), std::abs(q.y)});
  const double noise = 8.0 * std::numeric_limits<double>::epsilon() * scale;
  const double c1 = cross(w, d1), c2 = cross(w, d2);
  auto l1 = [](Vec2 v) { return std::abs(v.x) + std::abs(v.y); };
  // Four collinear points (up to rounding): the cell lies on a flat piece of the sphere.
  if (std::abs(c1) <= noise * (l1(w) + l1(d1)) && std::abs(c2) <= noise * (l1(w) + l1(d2))) return 0.0;
  const double c = cross(d1, d2);
  if (c == 0.0) return std::numeric_limits<double>::infinity();
  const double s = c2 / c, u = c1 / c;
  if (!(s >= 0.0) || !(u >= 0.0)) return std::numeric_limits<double>::infinity();
  return std::max(0.0, s * len_prev + u * len_next - len);
}

/// Adaptive refinement of the polar-angle partition of [theta_a, theta_a + span].
///
/// Each pass certifies every cell with cell_gap and halves the cells whose gap is at least
/// half the mean, so smooth arcs refine uniformly while corners (true or sharply rounded)
/// refine locally. The split rule does not depend on tol, so a smaller tol runs the same
/// passes for longer and the lower bracket can only grow.
///
/// A pass whose relative increase in length falls below tol proposes convergence, and the
/// proposal is accepted once the total gap is below kGapFactor * tol. The increase alone can
/// stall: chords straddling a square corner keep their l_inf length while one leg shrinks.
/// A gap below tol is accepted outright. The reported upper bracket is lower plus the gap.
inline DistanceResult refine_arc(const NormSpec& spec, double theta_a, double span, const ArcOptions& opt,
                                 std::vector<Vec2>* points_out = nullptr) {
  const std::size_t n0 = std::max<std::size_t>(8, static_cast<std::size_t>(std::ceil(span / kInitialCellAngle)));
  std::vector<double> th(n0 + 1);
  std::vector<Vec2> pts(n0 + 1);
  std::vector<double> len(n0);
  for (std::size_t j = 0; j <= n0; ++j) {
    th[j] = theta_a + span * double(j) / double(n0);
    pts[j] = sphere_point(spec, th[j]);
  }
  for (std::size_t j = 0; j < n0; ++j) len[j] = spec(pts[j + 1] - pts[j]);

  std::vector<double> gap, th2, len2;
  std::vector<Vec2> pts2;
  double prev_length = std::numeric_limits<double>::infinity();
  for (;;) {
    const std::size_t n = len.size();
    // Points one cell beyond each end; any point of the closed curve there gives a valid chord.
    const Vec2 before = sphere_point(spec, th[0] - (th[1] - th[0]));
    const Vec2 after = sphere_point(spec, th[n] + (th[n] - th[n - 1]));
    const double len_before = spec(pts[0] - before), len_after = spec(after - pts[n]);
    gap.resize(n);
    double length = 0.0, total_gap = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const Vec2 pv = j == 0 ? before : pts[j - 1];
      const Vec2 nx = j + 1 == n ? after : pts[j + 2];
      gap[j] = cell_gap(pv, pts[j], pts[j + 1], nx, j == 0 ? len_before : len[j - 1], len[j],
                        j + 1 == n ? len_after : len[j + 1]);
      length += len[j];
      total_gap += gap[j];
    }
    const double increase = length - prev_length;
    prev_length = std::max(prev_length == std::numeric_limits<double>::infinity() ? 0.0 : prev_length, length);
    const bool quiet = increase < opt.tol * length;
    if (total_gap <= opt.tol * length || (quiet && total_gap <= kGapFactor * opt.tol * length)) {
      if (points_out) *points_out = std::move(pts);
      return {length, length, length + total_gap, n, ArcChoice::ccw};
    }

    const double threshold = total_gap / (2.0 * double(n));
    std::size_t splits = 0;
    for (std::size_t j = 0; j < n; ++j) splits += gap[j] >= threshold && th[j + 1] - th[j] > 4e-15 * kTwoPi;
    if (splits == 0 || n + splits > opt.max_segments) {
      throw ArcNotConverged({length, length, length + total_gap, n, ArcChoice::ccw});
    }
    th2.clear();
    pts2.clear();
    len2.clear();
    th2.reserve(n + splits + 1);
    pts2.reserve(n + splits + 1);
    len2.reserve(n + splits);
    for (std::size_t j = 0; j < n; ++j) {
      th2.push_back(th[j]);
      pts2.push_back(pts[j]);
      if (gap[j] >= threshold && th[j + 1] - th[j] > 4e-15 * kTwoPi) {
        const double tm = 0.5 * (th[j] + th[j + 1]);
        const Vec2 mid = sphere_point(spec, tm);
        th2.push_back(tm);
        pts2.push_back(mid);
        len2.push_back(spec(mid - pts[j]));
        len2.push_back(spec(pts[j + 1] - mid));
      } else {
        len2.push_back(len[j]);
      }
    }
    th2.push_back(th[n]);
    pts2.push_back(pts[n]);
    th.swap(th2);
    pts.swap(pts2);
    len.swap(len2);
  }
}

}  // namespace detail

/// Length in ||.||_X of the sphere arc over polar angles [theta_a, theta_b].
inline DistanceResult arc_length(const NormSpec& spec, double theta_a, double theta_b, const ArcOptions& opt) {
  if (!(opt.tol > 0.0)) throw PreconditionError("arc_length: tol must be positive");
  const double span = theta_b - theta_a;
  if (!(span >= 0.0) || span > kTwoPi + 1e-12) throw PreconditionError("arc_length: need theta_a <= theta_b <= theta_a + 2pi");
  if (span == 0.0) return {};
  if (opt.exact_polygons)
    if (auto verts = spec.sphere_vertices()) return detail::vertex_walk(spec, *verts, theta_a, std::min(span, kTwoPi));
  return detail::refine_arc(spec, theta_a, std::min(span, kTwoPi), opt);
}

inline DistanceResult arc_length(const NormSpec& spec, double theta_a, double theta_b, double tol = kDefaultArcTol) {
  ArcOptions opt;
  opt.tol = tol;
  return arc_length(spec, theta_a, theta_b, opt);
}

/// Length of the whole unit sphere measured in its own norm.
inline DistanceResult circumference(const NormSpec& spec, double tol = kDefaultArcTol) {
  return arc_length(spec, 0.0, kTwoPi, tol);
}

/// Intrinsic distance between x and y on S_X: the shorter boundary arc.
inline DistanceResult intrinsic_distance(const NormSpec& spec, Vec2 x, Vec2 y, const ArcOptions& opt) {
  if (std::abs(spec(x) - 1.0) > kSphereSlack || std::abs(spec(y) - 1.0) > kSphereSlack)
    throw DomainError("intrinsic_distance: points must lie on the unit sphere");
  if (x == y) return {};
  const double tx = angle_of(x), ty = angle_of(y);
  const double span = numeric::wrap_angle(ty - tx);
  if (span == 0.0) return {};
  const DistanceResult ccw = arc_length(spec, tx, tx + span, opt);
  DistanceResult cw = arc_length(spec, ty, ty + (kTwoPi - span), opt);
  cw.arc_choice = ArcChoice::cw;
  // Ties within tol go counterclockwise.
  return cw.value < ccw.value - opt.tol * ccw.value ? cw : ccw;
}

inline DistanceResult intrinsic_distance(const NormSpec& spec, Vec2 x, Vec2 y, double tol = kDefaultArcTol) {
  ArcOptions opt;
  opt.tol = tol;
  return intrinsic_distance(spec, x, y, opt);
}

/// Cumulative arc lengths of the whole sphere, built once per norm.
///
/// Any arc is measured along the inscribed polyline through its end points and
/// the table's nodes in between, so every value is a lower bound for the true
/// length, and its deficit is at most the whole table's deficit. For polygonal
/// spheres the nodes are the vertices and lengths are exact. Use this when many
/// distances are needed on one norm.
class ArcLengthTable {
 public:
  explicit ArcLengthTable(NormSpec spec, const ArcOptions& opt = {}) : spec_(std::move(spec)) {
    std::vector<Vec2> pts;
    if (auto verts = opt.exact_polygons ? spec_.sphere_vertices() : std::nullopt) {
      pts = *verts;
      std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) { return angle_of(a) < angle_of(b); });
      slack_ = 0.0;
    } else {
      const DistanceResult full = detail::refine_arc(spec_, 0.0, kTwoPi, opt, &pts);
      pts.pop_back();  // the closing point repeats the first
      slack_ = full.upper - full.lower;
    }
    points_ = std::move(pts);
    angles_.reserve(points_.size());
    cum_.reserve(points_.size() + 1);
    cum_.push_back(0.0);
    for (std::size_t i = 0; i < points_.size(); ++i) {
      angles_.push_back(angle_of(points_[i]));
      cum_.push_back(cum_.back() + spec_(points_[(i + 1) % points_.size()] - points_[i]));
    }
  }

  const NormSpec& spec() const { return spec_; }
  double circumference() const { return cum_.back(); }
  std::size_t nodes() const { return points_.size(); }

  /// Length of the arc over polar angles [theta_a, theta_a + span], span in [0, 2pi].
  double arc(double theta_a, double span) const {
    if (span <= 0.0) return 0.0;
    const std::size_t n = points_.size();
    const double ta = numeric::wrap_angle(theta_a);
    const Vec2 pa = sphere_point(spec_, ta);
    const Vec2 pb = sphere_point(spec_, ta + span);
    // Nodes strictly inside the arc, counted in the cyclic order starting after ta.
    const std::size_t first = next_node(ta);                 // first node with angle > ta (cyclic index)
    if (relative_angle(first, ta) >= span) return spec_(pb - pa);
    const std::size_t last = last_node(first, ta, span);     // last node with relative angle < span
    return spec_(points_[first % n] - pa) + cyclic_sum(first, last) + spec_(pb - points_[last % n]);
  }

  DistanceResult distance(Vec2 x, Vec2 y, double tol = kDefaultArcTol) const {
    if (std::abs(spec_(x) - 1.0) > kSphereSlack || std::abs(spec_(y) - 1.0) > kSphereSlack)
      throw DomainError("intrinsic_distance: points must lie on the unit sphere");
    if (x == y) return {};
    const double tx = angle_of(x), ty = angle_of(y);
    const double span = numeric::wrap_angle(ty - tx);
    if (span == 0.0) return {};
    const double ccw = arc(tx, span), cw = arc(ty, kTwoPi - span);
    const bool take_cw = cw < ccw - tol * ccw;
    const double v = take_cw ? cw : ccw;
    return {v, v, v + slack_, points_.size(), take_cw ? ArcChoice::cw : ArcChoice::ccw};
  }

  double ratio(Vec2 x, Vec2 y) const {
    if (x == y) throw PreconditionError("distance_ratio: points must differ");
    return distance(x, y).value / spec_(x - y);
  }

 private:
  /// Cyclic index (possibly == n, meaning node 0 after wrap) of the first node with angle > t.
  std::size_t next_node(double t) const {
    return static_cast<std::size_t>(std::upper_bound(angles_.begin(), angles_.end(), t) - angles_.begin());
  }
  std::size_t last_node(std::size_t first, double ta, double span) const {
    // Binary search over cyclic offsets k >= 0 for the last node with relative angle < span.
    const std::size_t n = points_.size();
    std::size_t lo = 0, hi = n;  // invariant: offset lo is inside, offset hi is not (or past the turn)
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      const std::size_t idx = first + mid;
      const double rel = relative_angle(idx, ta);
      if (rel < span) lo = mid; else hi = mid;
    }
    return first + lo;
  }
  double relative_angle(std::size_t idx, double ta) const {
    const std::size_t n = points_.size();
    return angles_[idx % n] + (idx >= n ? kTwoPi : 0.0) - ta;
  }
  /// Sum of chord lengths from node i to node j along the cycle (cyclic indices, i <= j < i + n).
  double cyclic_sum(std::size_t i, std::size_t j) const {
    const std::size_t n = points_.size();
    const double c = cum_.back();
    auto at = [&](std::size_t k) { return cum_[k % n] + (k >= n ? c : 0.0); };
    return at(j) - at(i);
  }

  NormSpec spec_;
  std::vector<Vec2> points_;
  std::vector<double> angles_;
  std::vector<double> cum_;
  double slack_{0.0};
};

/// Intrinsic distance over chordal distance.
inline double distance_ratio(const NormSpec& spec, Vec2 x, Vec2 y, double tol = kDefaultArcTol) {
  if (x == y) throw PreconditionError("distance_ratio: points must differ");
  return intrinsic_distance(spec, x, y, tol).value / spec(x - y);
}

/// Great-circle distance on the Euclidean unit circle.
inline double euclidean_intrinsic_oracle(Vec2 x, Vec2 y) {
  if (std::abs(norm_e(x) - 1.0) > 1e-9 || std::abs(norm_e(y) - 1.0) > 1e-9)
    throw DomainError("euclidean_intrinsic_oracle: points must lie on the unit circle");
  return 2.0 * std::asin(std::min(1.0, norm_e(x - y) / 2.0));
}

}  // namespace unisphere
