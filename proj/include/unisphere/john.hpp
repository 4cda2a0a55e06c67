#pragma once
/**
 * @file john.hpp
 * @brief Maximum-area centered ellipse inside a symmetric planar unit ball.
 *
 * The ball is described by facet functionals a_i (B ⊆ {x : |<a_i, x>| <= 1}).
 * Writing the ellipse as E = L B_E with L symmetric positive definite, E lies
 * in the facet polygon iff |L a_i| <= 1 for all i, and its area is pi det L.
 * We maximize log det L with a log-barrier interior-point method (damped
 * Newton on the three free entries of L, backtracking line search), then
 * report M = (L L^T)^{-1}, i.e. E = {x : x^T M x <= 1}.
 *
 * Polygonal balls use their exact edges. Other balls use an inscribed polygon
 * through sphere points. The solution is then rescaled so that it touches the
 * true sphere, which recovers the slack left by the chords (all of it for a
 * round ball) and absorbs rounding; verify_john re-checks against the true
 * gauge anyway.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "errors.hpp"
#include "norms.hpp"
#include "numeric.hpp"
#include "report.hpp"
#include "vec.hpp"

namespace unisphere {

/// Centered ellipse {x : x^T M x <= 1}; M symmetric positive definite.
class Ellipse {
 public:
  static Ellipse from_matrix(const Mat2& m) {
    NormSpec::ellipse(m);  // validates
    return Ellipse(Mat2::symmetric(m.a, m.b, m.d));
  }
  /// The ellipse L B_E for symmetric positive-definite L.
  static Ellipse from_shape(const Mat2& l) {
    const Mat2 inv = l.inverse();
    const Mat2 m = inv.transpose() * inv;
    return from_matrix(Mat2::symmetric(m.a, 0.5 * (m.b + m.c), m.d));
  }

  const Mat2& matrix() const { return m_; }
  double area() const { return kPi / std::sqrt(m_.det()); }
  double norm(Vec2 v) const { return std::sqrt(std::max(0.0, dot(v, m_ * v))); }

  /// Symmetric positive-definite L with E = L B_E (the square root of M^{-1}).
  Mat2 shape() const {
    const Mat2 a = m_.inverse();
    const double s = std::sqrt(a.det());
    const double t = std::sqrt(a.trace() + 2.0 * s);
    const Mat2 r = (a + Mat2::identity() * s) * (1.0 / t);
    return Mat2::symmetric(r.a, 0.5 * (r.b + r.c), r.d);
  }

  Json to_json() const { return Json{{"m", unisphere::to_json(m_)}}; }

 private:
  explicit Ellipse(const Mat2& m) : m_(m) {}
  Mat2 m_;
};

class SolverNotConverged : public std::runtime_error {
 public:
  explicit SolverNotConverged(Ellipse best)
      : std::runtime_error("John ellipse solver did not converge within the iteration cap"), best_(best) {}
  const Ellipse& best() const noexcept { return best_; }

 private:
  Ellipse best_;
};

inline constexpr int kDefaultJohnFacets = 256;
inline constexpr double kDefaultJohnTol = 1e-10;
inline constexpr int kJohnIterationCap = 10000;

/// Facet functionals, one per antipodal pair. Exact for polygons; for other balls the
/// polygon they bound is inscribed in B_X.
inline std::vector<Vec2> john_facets(const NormSpec& spec, int facets = kDefaultJohnFacets) {
  std::vector<Vec2> out;
  if (auto verts = spec.sphere_vertices()) {
    const std::size_t m = verts->size();
    for (std::size_t i = 0; i < m / 2; ++i) {
      const Vec2 p = (*verts)[i], q = (*verts)[(i + 1) % m];
      out.push_back(Vec2{q.y - p.y, p.x - q.x} / cross(p, q));
    }
    return out;
  }
  if (facets < 8) throw PreconditionError("john_facets: need at least 8 facets for a non-polygonal ball");
  // Inscribed polygon through sphere points at equal angles. Supporting lines would be the
  // other natural choice, but over a flat stretch two of them meet in a roof of height O(h),
  // while chords are exact there and elsewhere miss the ball only by O(h^2) sagittas.
  const int pairs = (facets + 1) / 2;
  std::vector<Vec2> pts(pairs + 1);
  for (int k = 0; k < pairs; ++k) pts[k] = sphere_point(spec, kPi * k / pairs);
  pts[pairs] = -pts[0];
  for (int k = 0; k < pairs; ++k) {
    const Vec2 p = pts[k], q = pts[k + 1];
    const Vec2 n{q.y - p.y, p.x - q.x};
    out.push_back(n / dot(n, 0.5 * (p + q)));
  }
  return out;
}

struct JohnSolution {
  Ellipse ellipse;
  Mat2 shape;                ///< L, symmetric, E = L B_E
  std::vector<Vec2> facets;  ///< constraints |L a| <= 1 the solver used
  int iterations{0};
  double shrink{1.0};        ///< factor applied after solving so that E touches the true sphere
};

namespace detail {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<Vec3, 3>;

inline Mat2 shape_from(const Vec3& p) { return Mat2::symmetric(p[0], p[1], p[2]); }

inline bool solve3(Mat3 a, Vec3 b, Vec3& x) {
  for (int c = 0; c < 3; ++c) {
    int piv = c;
    for (int r = c + 1; r < 3; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    if (std::abs(a[piv][c]) < 1e-300) return false;
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    for (int r = c + 1; r < 3; ++r) {
      const double f = a[r][c] / a[c][c];
      for (int k = c; k < 3; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  for (int c = 2; c >= 0; --c) {
    double s = b[c];
    for (int k = c + 1; k < 3; ++k) s -= a[c][k] * x[k];
    x[c] = s / a[c][c];
  }
  return true;
}

/// Barrier objective -log det L - mu * sum log(1 - |L a_i|^2); +inf outside the domain.
inline double barrier_value(const Vec3& p, const std::vector<Vec2>& facets, double mu) {
  const Mat2 l = shape_from(p);
  const double det = l.det();
  if (!(det > 0.0) || !(l.a > 0.0)) return std::numeric_limits<double>::infinity();
  double f = -std::log(det);
  for (const auto& a : facets) {
    const Vec2 w = l * a;
    const double s = 1.0 - dot(w, w);
    if (!(s > 0.0)) return std::numeric_limits<double>::infinity();
    f -= mu * std::log(s);
  }
  return f;
}

inline void barrier_derivatives(const Vec3& p, const std::vector<Vec2>& facets, double mu, Vec3& g, Mat3& h) {
  const Mat2 l = shape_from(p);
  const Mat2 li = l.inverse();
  // Basis of symmetric matrices matching p = (l11, l12, l22).
  const std::array<Mat2, 3> basis{Mat2{1, 0, 0, 0}, Mat2{0, 1, 1, 0}, Mat2{0, 0, 0, 1}};
  std::array<Mat2, 3> lie;
  for (int j = 0; j < 3; ++j) lie[j] = li * basis[j];
  for (int j = 0; j < 3; ++j) {
    g[j] = -lie[j].trace();
    for (int k = 0; k < 3; ++k) h[j][k] = (lie[j] * lie[k]).trace();
  }
  for (const auto& a : facets) {
    const Vec2 w = l * a;
    const double s = 1.0 - dot(w, w);
    // dq/dp = 2 J^T w with J = [[a1, a2, 0], [0, a1, a2]]
    const Vec3 dq{2.0 * w.x * a.x, 2.0 * (w.x * a.y + w.y * a.x), 2.0 * w.y * a.y};
    const Mat3 jtj{{{a.x * a.x, a.x * a.y, 0.0},
                    {a.x * a.y, a.x * a.x + a.y * a.y, a.x * a.y},
                    {0.0, a.x * a.y, a.y * a.y}}};
    for (int j = 0; j < 3; ++j) {
      g[j] += mu * dq[j] / s;
      for (int k = 0; k < 3; ++k) h[j][k] += mu * (2.0 * jtj[j][k] / s + dq[j] * dq[k] / (s * s));
    }
  }
}

}  // namespace detail

namespace detail {

/// Barrier Newton on log det L subject to |L a| <= 1 for every facet a; returns (a, b, c) of L.
inline Vec3 maximize_log_det(const std::vector<Vec2>& a, double tol, int& iterations) {
  const double m = static_cast<double>(a.size());
  // Start from a strictly interior disk.
  double rmin = std::numeric_limits<double>::infinity();
  for (const auto& f : a) rmin = std::min(rmin, 1.0 / norm_e(f));
  Vec3 p{0.99 * rmin, 0.0, 0.99 * rmin};

  double mu = 1.0;
  for (;;) {
    for (;;) {
      if (++iterations > kJohnIterationCap) throw SolverNotConverged(Ellipse::from_shape(shape_from(p)));
      Vec3 g, step;
      Mat3 h;
      barrier_derivatives(p, a, mu, g, h);
      if (!solve3(h, {-g[0], -g[1], -g[2]}, step)) break;
      const double decrement = -(g[0] * step[0] + g[1] * step[1] + g[2] * step[2]);
      if (decrement < 1e-22) break;
      const double f0 = barrier_value(p, a, mu);
      double t = 1.0;
      Vec3 trial{};
      for (int bt = 0; bt < 80; ++bt, t *= 0.5) {
        for (int j = 0; j < 3; ++j) trial[j] = p[j] + t * step[j];
        if (barrier_value(trial, a, mu) <= f0 - 0.25 * t * decrement) break;
      }
      if (!(barrier_value(trial, a, mu) < f0)) break;
      p = trial;
      if (decrement < 1e-18) break;
    }
    if (m * mu <= tol) break;
    mu *= 0.1;
  }
  return p;
}

/// Chords between sphere points at the given sorted angles in [0, pi), closed by antipodal symmetry.
inline std::vector<Vec2> chord_facets(const NormSpec& spec, const std::vector<double>& angles) {
  std::vector<Vec2> pts;
  pts.reserve(angles.size() + 1);
  for (double t : angles) pts.push_back(sphere_point(spec, t));
  pts.push_back(-pts.front());
  std::vector<Vec2> out;
  out.reserve(angles.size());
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    // Offset measured at the chord midpoint: on short chords the normal carries the rounding
    // of q - p, and a tilt about the midpoint only moves the line where the chord is.
    const Vec2 p = pts[k], q = pts[k + 1];
    const Vec2 n{q.y - p.y, p.x - q.x};
    out.push_back(n / dot(n, 0.5 * (p + q)));
  }
  return out;
}

inline constexpr int kJohnRefineRounds = 8;
/// Cells narrower than this (radians) are not split further.
inline constexpr double kJohnMinCell = 1e-7;
inline constexpr int kJohnRefineSplit = 16;
inline constexpr std::size_t kJohnRefinePeaks = 16;
/// How far a reach peak must rise above its neighbours to count as a contact.
inline constexpr double kJohnPeakMargin = 1e-13;

}  // namespace detail

/// Largest-area centered ellipse inside the facet polygon of spec (see file comment).
///
/// For non-polygonal balls the optimum is only weakly pinned: with two contact pairs, tilting
/// the ellipse by e costs O(e^2) penetration, so an O(h^2) chord sagitta leaves an O(h) error
/// in the matrix. After the uniform solve, the chords near contact are therefore subdivided
/// and the problem solved again until the area stops changing.
inline JohnSolution solve_john(const NormSpec& spec, int facets = kDefaultJohnFacets, double tol = kDefaultJohnTol) {
  if (!(tol > 0.0)) throw PreconditionError("solve_john: tol must be positive");
  if (const auto* e = spec.get_if<NormSpec::Ellipse>()) {
    // An ellipse is its own John ellipse.
    const Ellipse ell = Ellipse::from_matrix(e->m);
    return {ell, ell.shape(), {}, 0, 1.0};
  }
  int iterations = 0;
  std::vector<Vec2> a = john_facets(spec, facets);
  detail::Vec3 p = detail::maximize_log_det(a, tol, iterations);

  if (!spec.sphere_vertices()) {
    const int pairs = (facets + 1) / 2;
    std::vector<double> angles(pairs);
    for (int k = 0; k < pairs; ++k) angles[k] = kPi * k / pairs;
    for (int round = 0; round < detail::kJohnRefineRounds; ++round) {
      const Mat2 l = detail::shape_from(p);
      const std::size_t n = a.size();
      std::vector<double> reach(n);
      for (std::size_t k = 0; k < n; ++k) reach[k] = norm_e(l * a[k]);
      // Local maxima of the reach that stand above rounding are the contact candidates. Only the
      // largest few are refined, with their neighbours. On a round ball no peak qualifies and the
      // uniform chords are kept, which preserves the symmetry; the final rescale is then exact.
      std::vector<std::pair<double, std::size_t>> peaks;
      for (std::size_t k = 0; k < n; ++k) {
        const double prev = reach[(k + n - 1) % n], next = reach[(k + 1) % n];
        const double m = detail::kJohnPeakMargin;
        if (reach[k] >= 1.0 - 1e-3 && reach[k] > prev + m && reach[k] + m >= next) peaks.push_back({reach[k], k});
      }
      const std::size_t keep = std::min<std::size_t>(peaks.size(), detail::kJohnRefinePeaks);
      std::partial_sort(peaks.begin(), peaks.begin() + keep, peaks.end(), std::greater<>());
      std::vector<char> refine(n, 0);
      for (std::size_t i = 0; i < keep; ++i)
        for (std::size_t d : {n - 1, std::size_t{0}, std::size_t{1}}) refine[(peaks[i].second + d) % n] = 1;
      std::vector<double> next_angles;
      next_angles.reserve(angles.size() + 3 * detail::kJohnRefineSplit);
      for (std::size_t k = 0; k < n; ++k) {
        next_angles.push_back(angles[k]);
        const double hi = k + 1 < n ? angles[k + 1] : kPi;
        if (!refine[k] || hi - angles[k] < detail::kJohnRefineSplit * detail::kJohnMinCell) continue;
        for (int j = 1; j < detail::kJohnRefineSplit; ++j)
          next_angles.push_back(angles[k] + (hi - angles[k]) * j / detail::kJohnRefineSplit);
      }
      if (next_angles.size() == angles.size()) break;
      angles = std::move(next_angles);
      a = detail::chord_facets(spec, angles);
      const double before = detail::shape_from(p).det();
      p = detail::maximize_log_det(a, tol, iterations);
      if (std::abs(detail::shape_from(p).det() - before) <= 1e-14 * before) break;
    }
  }

  Mat2 l = detail::shape_from(p);
  double shrink = 1.0;
  if (!spec.sphere_vertices()) {
    // The chord polygon lies inside the ball, so usually worst < 1 and E grows to touch it.
    auto reach = [&](double t) { return spec(l * unit_direction(t)); };
    constexpr int grid = 4096;
    int best = 0;
    double worst = reach(0.0);
    for (int i = 1; i < grid; ++i)
      if (const double v = reach(kPi * i / grid); v > worst) worst = v, best = i;
    const double h = kPi / grid;
    worst = std::max(worst, numeric::golden_section_max(reach, (best - 1) * h, (best + 1) * h, 1e-13).value);
    shrink = 1.0 / worst;
    l = l * shrink;
  }
  return {Ellipse::from_shape(l), l, std::move(a), iterations, shrink};
}

inline Ellipse inner_john_ellipse(const NormSpec& spec, int facets = kDefaultJohnFacets, double tol = kDefaultJohnTol) {
  return solve_john(spec, facets, tol).ellipse;
}

struct JohnCertificate {
  Ellipse ellipse;
  bool inner_ok;
  bool outer_ok;
  double worst_inner_margin;  ///< 1 - max over E's boundary of ||e||_X
  double worst_outer_margin;  ///< sqrt 2 - max over S_X of ||s||_E-ellipse
  Vec2 inner_witness;
  Vec2 outer_witness;
  double tolerance;

  Json to_json() const {
    return Json{{"ellipse", ellipse.to_json()},
                {"inner_ok", inner_ok},
                {"outer_ok", outer_ok},
                {"worst_inner_margin", worst_inner_margin},
                {"worst_outer_margin", worst_outer_margin},
                {"witnesses", Json{{"inner", unisphere::to_json(inner_witness)},
                                   {"outer", unisphere::to_json(outer_witness)}}},
                {"tolerance", tolerance}};
  }
};

/// Checks E ⊆ B_X ⊆ sqrt(2) E on boundary samples of both bodies, polished around the worst sample.
inline JohnCertificate verify_john(const NormSpec& spec, const Ellipse& ellipse, int samples = 4096, double tol = 1e-6) {
  if (samples < 64) throw PreconditionError("verify_john: need at least 64 samples");
  const Mat2 l = ellipse.shape();
  const double h = kPi / samples;  // both bodies are symmetric: half a turn suffices

  auto worst_of = [&](auto&& f) {
    int best = 0;
    double v = f(0.0);
    for (int i = 1; i < samples; ++i)
      if (const double w = f(i * h); w > v) v = w, best = i;
    const auto polished = numeric::golden_section_max(f, (best - 1) * h, (best + 1) * h, 1e-13);
    return polished.value > v ? numeric::Extremum{polished.arg, polished.value} : numeric::Extremum{best * h, v};
  };

  auto inner_reach = [&](double t) { return spec(l * unit_direction(t)); };
  auto outer_reach = [&](double t) { return ellipse.norm(sphere_point(spec, t)); };
  const auto in = worst_of(inner_reach);
  auto out = worst_of(outer_reach);
  Vec2 outer_point = sphere_point(spec, out.arg);
  if (auto verts = spec.sphere_vertices()) {
    for (const auto& v : *verts)
      if (const double r = ellipse.norm(v); r > out.value) out.value = r, outer_point = v;
  }

  JohnCertificate cert{ellipse, false, false, 1.0 - in.value, std::sqrt(2.0) - out.value,
                       l * unit_direction(in.arg), outer_point, tol};
  cert.inner_ok = cert.worst_inner_margin >= -tol;
  cert.outer_ok = cert.worst_outer_margin >= -tol;
  return cert;
}

/// The Euclidean structure whose unit ball is the ellipse.
inline NormSpec euclidean_from_ellipse(const Ellipse& ellipse) { return NormSpec::ellipse(ellipse.matrix()); }

/// spec in coordinates where the ellipse becomes B_E: z -> ||C^{-T} z||_X with M = C C^T (Cholesky).
/// When the ellipse is John's, the result satisfies B_E ⊆ B_X' ⊆ sqrt(2) B_E.
inline NormSpec push_forward(const NormSpec& spec, const Ellipse& ellipse) {
  const Mat2 c = cholesky(ellipse.matrix());
  return NormSpec::linear(spec, c.transpose().inverse());
}

}  // namespace unisphere
