#pragma once
/**
 * @file norms.hpp
 * @brief Symmetric norms on the plane, given by their unit ball.
 *
 * A NormSpec is an immutable value describing one of
 *   - an l_p norm, 1 <= p <= inf (p = inf is its own enumerator),
 *   - a symmetric convex polygon (its vertices, counterclockwise),
 *   - an ellipse norm sqrt(v^T M v),
 *   - the restriction of an n-dimensional norm to a plane (a section),
 *   - a scaled ball  factor * B_inner, i.e. ||v|| = ||v||_inner / factor,
 *   - a linear pullback ||v|| = ||A v||_inner.
 *
 * Everything is validated at construction; evaluation never throws.
 * Copies are cheap (the variant is shared, never mutated).
 */

#include <algorithm>
#include <array>
#include <limits>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "numeric.hpp"
#include "report.hpp"
#include "vec.hpp"

namespace unisphere {

enum class LpKind { finite, infinity };

struct LpExponent {
  LpKind kind{LpKind::finite};
  double p{2.0};  // meaningful only when kind == finite

  static LpExponent finite(double p) {
    if (!(p >= 1.0) || !std::isfinite(p)) throw InvalidNorm("l_p exponent must be a finite number >= 1 (use infinity() for p = inf)");
    return {LpKind::finite, p};
  }
  static LpExponent infinity() { return {LpKind::infinity, 0.0}; }
  bool is_infinite() const { return kind == LpKind::infinity; }
  bool operator==(const LpExponent&) const = default;
};

namespace detail {

inline double lp_value(const LpExponent& e, std::span<const double> v) {
  double largest = 0.0;
  for (double c : v) largest = std::max(largest, std::abs(c));
  if (e.is_infinite() || largest == 0.0) return largest;
  if (e.p == 1.0) {
    double s = 0.0;
    for (double c : v) s += std::abs(c);
    return s;
  }
  // Scale by the largest entry so nothing overflows.
  if (e.p == 2.0) {
    double s = 0.0;
    for (double c : v) s += (c / largest) * (c / largest);
    return largest * std::sqrt(s);
  }
  if (v.size() == 2) {
    // The largest coordinate contributes exactly 1; one pow call saved on the hot path.
    const double small = std::min(std::abs(v[0]), std::abs(v[1])) / largest;
    return largest * std::pow(1.0 + std::pow(small, e.p), 1.0 / e.p);
  }
  double s = 0.0;
  for (double c : v) s += std::pow(std::abs(c) / largest, e.p);
  return largest * std::pow(s, 1.0 / e.p);
}

}  // namespace detail

/// A norm on R^n, n >= 2. Only ever evaluated on planes through a section.
class NormSpecN {
 public:
  using Gauge = std::function<double(std::span<const double>)>;

  static NormSpecN lp(LpExponent e, std::size_t dim) { return NormSpecN(dim, LpData{e}); }
  static NormSpecN lp(double p, std::size_t dim) { return lp(LpExponent::finite(p), dim); }
  static NormSpecN lp_infinity(std::size_t dim) { return lp(LpExponent::infinity(), dim); }

  /// Caller-supplied gauge; must be deterministic. Only sampled, never proven, to be a norm.
  static NormSpecN custom(std::size_t dim, Gauge gauge, std::string label = "custom") {
    if (!gauge) throw InvalidNorm("custom gauge must be callable");
    return NormSpecN(dim, CustomData{std::move(gauge), std::move(label)});
  }

  std::size_t dim() const { return dim_; }

  double operator()(std::span<const double> v) const {
    if (const auto* lp = std::get_if<LpData>(&data_)) return detail::lp_value(lp->exponent, v);
    return std::get<CustomData>(data_).gauge(v);
  }

  const LpExponent* lp_exponent() const {
    const auto* lp = std::get_if<LpData>(&data_);
    return lp ? &lp->exponent : nullptr;
  }
  bool is_custom() const { return std::holds_alternative<CustomData>(data_); }
  std::string label() const {
    if (const auto* c = std::get_if<CustomData>(&data_)) return c->label;
    return "lp";
  }

 private:
  struct LpData {
    LpExponent exponent;
  };
  struct CustomData {
    Gauge gauge;
    std::string label;
  };

  NormSpecN(std::size_t dim, std::variant<LpData, CustomData> data) : dim_(dim), data_(std::move(data)) {
    if (dim_ < 2) throw InvalidNorm("ambient dimension must be at least 2");
  }

  std::size_t dim_;
  std::variant<LpData, CustomData> data_;
};

enum class NormKind { lp, polygon, ellipse, section, scaled, linear };

class NormSpec {
 public:
  struct Lp {
    LpExponent exponent;
  };
  /// Vertices counterclockwise starting at the smallest polar angle in [0, 2pi).
  /// normals[i] is the functional equal to 1 on the edge vertices[i] -> vertices[i+1].
  struct Polygon {
    std::vector<Vec2> vertices;
    std::vector<double> angles;
    std::vector<Vec2> normals;
  };
  struct Ellipse {
    Mat2 m;
  };
  /// ||(a, b)|| = ambient(a*u + b*v), u and v Euclidean-orthonormal.
  struct Section {
    NormSpecN ambient;
    VecN u;
    VecN v;
  };
  struct Scaled {
    std::shared_ptr<const NormSpec> inner;
    double factor;
  };
  struct Linear {
    std::shared_ptr<const NormSpec> inner;
    Mat2 map;
  };
  using Variant = std::variant<Lp, Polygon, Ellipse, Section, Scaled, Linear>;

  static NormSpec lp(LpExponent e) { return NormSpec(Lp{e}); }
  static NormSpec lp(double p) { return lp(LpExponent::finite(p)); }
  static NormSpec lp_infinity() { return lp(LpExponent::infinity()); }

  static NormSpec polygon(std::vector<Vec2> ccw_vertices);
  static NormSpec ellipse(const Mat2& m);
  static NormSpec section(NormSpecN ambient, VecN u, VecN v);
  static NormSpec scaled(const NormSpec& inner, double factor);
  static NormSpec linear(const NormSpec& inner, const Mat2& map);

  double operator()(Vec2 v) const;

  NormKind kind() const { return static_cast<NormKind>(v_->index()); }
  const Variant& variant() const { return *v_; }
  template <class T>
  const T* get_if() const {
    return std::get_if<T>(v_.get());
  }

  /// Sphere vertices in counterclockwise order when the unit sphere is a known polygon.
  std::optional<std::vector<Vec2>> sphere_vertices() const;

 private:
  explicit NormSpec(Variant v) : v_(std::make_shared<const Variant>(std::move(v))) {}
  std::shared_ptr<const Variant> v_;
};

// ---------------------------------------------------------------------------
// construction

namespace detail {

inline double polar_angle(Vec2 v) { return numeric::wrap_angle(std::atan2(v.y, v.x)); }

inline constexpr double kPolygonRelTol = 1e-12;

}  // namespace detail

inline NormSpec NormSpec::polygon(std::vector<Vec2> verts) {
  const std::size_t m = verts.size();
  if (m < 4) throw InvalidNorm("polygon needs at least 4 vertices");
  if (m % 2 != 0) throw InvalidNorm("symmetric polygon must have an even number of vertices");
  double scale = 0.0;
  for (const auto& p : verts) {
    if (!is_finite(p)) throw InvalidNorm("polygon vertex is not finite");
    scale = std::max(scale, norm_e(p));
  }
  const double eps = detail::kPolygonRelTol * scale * scale;
  double winding = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const Vec2 p = verts[i], q = verts[(i + 1) % m], r = verts[(i + 2) % m];
    if (!(cross(p, q) > eps)) throw InvalidNorm("origin is not strictly inside the polygon, or vertices are not counterclockwise");
    if (!(cross(q - p, r - q) > eps)) throw InvalidNorm("polygon is not strictly convex (three collinear vertices or a reflex turn)");
    winding += std::atan2(cross(p, q), dot(p, q));
  }
  if (std::abs(winding - kTwoPi) > 1e-6) throw InvalidNorm("polygon winds around the origin more than once");
  for (std::size_t i = 0; i < m; ++i) {
    if (norm_e(verts[i] + verts[(i + m / 2) % m]) > 1e-9 * scale)
      throw InvalidNorm("polygon is not symmetric about the origin");
  }

  const auto first = std::min_element(verts.begin(), verts.end(), [](Vec2 a, Vec2 b) {
    return detail::polar_angle(a) < detail::polar_angle(b);
  });
  std::rotate(verts.begin(), first, verts.end());

  Polygon poly;
  poly.vertices = std::move(verts);
  poly.angles.reserve(m);
  poly.normals.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    const Vec2 p = poly.vertices[i], q = poly.vertices[(i + 1) % m];
    poly.angles.push_back(detail::polar_angle(p));
    // <n, p> = <n, q> = 1
    const double c = cross(p, q);
    poly.normals.push_back(Vec2{q.y - p.y, p.x - q.x} / c);
  }
  return NormSpec(std::move(poly));
}

inline NormSpec NormSpec::ellipse(const Mat2& m) {
  if (!std::isfinite(m.a) || !std::isfinite(m.b) || !std::isfinite(m.c) || !std::isfinite(m.d))
    throw InvalidNorm("ellipse matrix has non-finite entries");
  if (std::abs(m.b - m.c) > 1e-12 * std::max(1.0, m.max_abs_entry()))
    throw InvalidNorm("ellipse matrix is not symmetric");
  const Mat2 sym{m.a, m.b, m.b, m.d};
  const auto [lo, hi] = symmetric_eigenvalues(sym);
  if (!(lo > 1e-12)) throw InvalidNorm("ellipse matrix is not positive definite");
  (void)hi;
  return NormSpec(Ellipse{sym});
}

inline NormSpec NormSpec::section(NormSpecN ambient, VecN u, VecN v) {
  if (u.size() != ambient.dim() || v.size() != ambient.dim())
    throw InvalidNorm("section basis vectors must match the ambient dimension");
  return NormSpec(Section{std::move(ambient), std::move(u), std::move(v)});
}

inline NormSpec NormSpec::scaled(const NormSpec& inner, double factor) {
  if (!(factor > 0.0) || !std::isfinite(factor)) throw InvalidNorm("scale factor must be a positive finite number");
  if (const auto* s = inner.get_if<Scaled>()) return scaled(*s->inner, s->factor * factor);
  return NormSpec(Scaled{std::make_shared<const NormSpec>(inner), factor});
}

inline NormSpec NormSpec::linear(const NormSpec& inner, const Mat2& map) {
  const double det = map.det();
  if (!std::isfinite(det) || std::abs(det) <= 1e-14 * std::max(1.0, map.max_abs_entry() * map.max_abs_entry()))
    throw InvalidNorm("linear map must be invertible");
  if (const auto* s = inner.get_if<Scaled>()) return scaled(linear(*s->inner, map), s->factor);
  if (const auto* l = inner.get_if<Linear>()) return linear(*l->inner, l->map * map);
  if (const auto* lp = inner.get_if<Lp>(); lp && !lp->exponent.is_infinite() && lp->exponent.p == 2.0)
    return linear(ellipse(Mat2::identity()), map);
  if (const auto* e = inner.get_if<Ellipse>()) {
    const Mat2 m = map.transpose() * e->m * map;
    return ellipse(Mat2::symmetric(m.a, 0.5 * (m.b + m.c), m.d));
  }
  if (auto verts = inner.sphere_vertices()) {
    // The new ball is map^{-1}(B_inner); an orientation-reversing map reverses the order.
    const Mat2 inv = map.inverse();
    for (auto& p : *verts) p = inv * p;
    if (det < 0.0) std::reverse(verts->begin(), verts->end());
    return polygon(std::move(*verts));
  }
  return NormSpec(Linear{std::make_shared<const NormSpec>(inner), map});
}

// ---------------------------------------------------------------------------
// evaluation

inline double NormSpec::operator()(Vec2 v) const {
  return std::visit(
      [&](const auto& n) -> double {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Lp>) {
          const double c[2] = {v.x, v.y};
          return detail::lp_value(n.exponent, c);
        } else if constexpr (std::is_same_v<T, Polygon>) {
          if (v.x == 0.0 && v.y == 0.0) return 0.0;
          // Edge i spans polar angles [angles[i], angles[i+1]); before angles[0] it is the closing edge.
          const double phi = detail::polar_angle(v);
          auto it = std::upper_bound(n.angles.begin(), n.angles.end(), phi);
          const std::size_t i = it == n.angles.begin() ? n.angles.size() - 1
                                                       : static_cast<std::size_t>(it - n.angles.begin()) - 1;
          return std::max(0.0, dot(n.normals[i], v));
        } else if constexpr (std::is_same_v<T, Ellipse>) {
          const double q = n.m.a * v.x * v.x + 2.0 * n.m.b * v.x * v.y + n.m.d * v.y * v.y;
          return std::sqrt(std::max(0.0, q));
        } else if constexpr (std::is_same_v<T, Section>) {
          VecN w(n.u.size());
          for (std::size_t i = 0; i < w.size(); ++i) w[i] = v.x * n.u[i] + v.y * n.v[i];
          return n.ambient(w);
        } else if constexpr (std::is_same_v<T, Scaled>) {
          return (*n.inner)(v) / n.factor;
        } else {
          return (*n.inner)(n.map * v);
        }
      },
      *v_);
}

inline std::optional<std::vector<Vec2>> NormSpec::sphere_vertices() const {
  if (const auto* p = get_if<Polygon>()) return p->vertices;
  if (const auto* lp = get_if<Lp>()) {
    if (lp->exponent.is_infinite()) return std::vector<Vec2>{{1, 1}, {-1, 1}, {-1, -1}, {1, -1}};
    if (lp->exponent.p == 1.0) return std::vector<Vec2>{{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return std::nullopt;
  }
  if (const auto* s = get_if<Scaled>()) {
    auto inner = s->inner->sphere_vertices();
    if (inner)
      for (auto& p : *inner) p = p * s->factor;
    return inner;
  }
  return std::nullopt;
}

inline double eval_norm(const NormSpec& spec, Vec2 v) { return spec(v); }

/// The point of S_X on the ray through (cos theta, sin theta).
inline Vec2 sphere_point(const NormSpec& spec, double theta) {
  const Vec2 c = unit_direction(theta);
  return c / spec(c);
}

// ---------------------------------------------------------------------------
// Euclidean sandwich

/// r * B_E  ⊆  B_X  ⊆  R * B_E with r maximal and R minimal; k = R / r.
struct SandwichConstants {
  double r;
  double R;
  double k;
};

namespace detail {

/// Extremes of theta -> ||sphere_point(theta)||_E on a grid over [0, pi), polished by golden section.
inline SandwichConstants sandwich_by_search(const NormSpec& spec, int resolution) {
  const double h = kPi / resolution;
  auto radius = [&](double t) { return 1.0 / spec(unit_direction(t)); };
  int imin = 0, imax = 0;
  double vmin = radius(0.0), vmax = vmin;
  for (int i = 1; i < resolution; ++i) {
    const double r = radius(i * h);
    if (r < vmin) vmin = r, imin = i;
    if (r > vmax) vmax = r, imax = i;
  }
  const auto lo = numeric::golden_section_min(radius, (imin - 1) * h, (imin + 1) * h, 1e-12);
  const auto hi = numeric::golden_section_max(radius, (imax - 1) * h, (imax + 1) * h, 1e-12);
  vmin = std::min(vmin, lo.value);
  vmax = std::max(vmax, hi.value);
  return {vmin, vmax, vmax / vmin};
}

}  // namespace detail

inline SandwichConstants sandwich_constants(const NormSpec& spec, int resolution = 4096) {
  if (resolution < 8) throw PreconditionError("sandwich_constants: resolution must be at least 8");
  return std::visit(
      [&](const auto& n) -> SandwichConstants {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, NormSpec::Lp>) {
          if (n.exponent.is_infinite()) return {1.0, std::sqrt(2.0), std::sqrt(2.0)};
          // Extremes sit on the axes and on the diagonals.
          const double diag = std::pow(2.0, 0.5 - 1.0 / n.exponent.p);
          const double r = std::min(1.0, diag), R = std::max(1.0, diag);
          return {r, R, R / r};
        } else if constexpr (std::is_same_v<T, NormSpec::Polygon>) {
          double r = std::numeric_limits<double>::infinity(), R = 0.0;
          for (const auto& v : n.vertices) R = std::max(R, norm_e(v));
          for (const auto& a : n.normals) r = std::min(r, 1.0 / norm_e(a));
          return {r, R, R / r};
        } else if constexpr (std::is_same_v<T, NormSpec::Ellipse>) {
          const auto [lo, hi] = symmetric_eigenvalues(n.m);
          const double r = 1.0 / std::sqrt(hi), R = 1.0 / std::sqrt(lo);
          return {r, R, R / r};
        } else if constexpr (std::is_same_v<T, NormSpec::Scaled>) {
          const auto in = sandwich_constants(*n.inner, resolution);
          return {in.r * n.factor, in.R * n.factor, in.k};
        } else {
          return detail::sandwich_by_search(spec, resolution);
        }
      },
      spec.variant());
}

struct NormalizedNorm {
  NormSpec spec;
  double k;
};

/// Rescales the ball so that the largest inscribed Euclidean disk is B_E (r = 1).
inline NormalizedNorm normalize_norm(const NormSpec& spec, int resolution = 4096) {
  const auto sc = sandwich_constants(spec, resolution);
  if (std::abs(sc.r - 1.0) <= 1e-12) return {spec, sc.k};
  return {NormSpec::scaled(spec, 1.0 / sc.r), sc.k};
}

// ---------------------------------------------------------------------------
// sections

inline constexpr double kMinSectionSine = 1e-8;

/// Plane section of an n-dimensional norm through span{x, y}, in a Euclidean-orthonormal basis.
inline NormSpec section_norm(const NormSpecN& ambient, const VecN& x, const VecN& y) {
  if (x.size() != ambient.dim() || y.size() != ambient.dim())
    throw DegenerateSection("section vectors must have the ambient dimension");
  const double nx = std::sqrt(dot(x, x)), ny = std::sqrt(dot(y, y));
  if (!(nx > 0.0) || !(ny > 0.0)) throw DegenerateSection("section vector is zero");
  VecN u(x.size()), v(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) u[i] = x[i] / nx;
  const double proj = dot(y, u);
  for (std::size_t i = 0; i < y.size(); ++i) v[i] = y[i] - proj * u[i];
  const double nv = std::sqrt(dot(v, v));
  if (!(nv / ny >= kMinSectionSine)) throw DegenerateSection("section vectors are (nearly) linearly dependent");
  for (double& c : v) c /= nv;
  return NormSpec::section(ambient, std::move(u), std::move(v));
}

// ---------------------------------------------------------------------------
// axiom sampling

// Adding +0.0 turns a negative zero into +0 so exports never print "-0.0".
inline Json to_json(Vec2 v) { return Json::array({v.x + 0.0, v.y + 0.0}); }

/// [[a, b], [c, d]]
inline Json to_json(const Mat2& m) {
  return Json::array({Json::array({m.a + 0.0, m.b + 0.0}), Json::array({m.c + 0.0, m.d + 0.0})});
}

namespace detail {

/// Relative-slack checks of homogeneity, symmetry and the triangle inequality for a gauge.
template <class Vector, class Eval, class Draw>
CheckReport sample_norm_axioms(Eval&& eval, Draw&& draw, std::size_t samples, std::uint64_t seed,
                               double tol) {
  CheckReport rep("norm-axioms", tol);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> alpha_dist(-10.0, 10.0);
  for (std::size_t t = 0; t < samples; ++t) {
    ++rep.trials;
    const Vector v = draw(rng), w = draw(rng);
    const double alpha = alpha_dist(rng);
    const double nv = eval(v), nw = eval(w);
    auto scaled = [](const Vector& a, double s) {
      Vector r = a;
      for (auto& c : r) c *= s;
      return r;
    };
    Vector sum = v;
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += w[i];

    const double hom = -std::abs(eval(scaled(v, alpha)) - std::abs(alpha) * nv) / std::max(1.0, std::abs(alpha) * nv);
    const double sym = -std::abs(eval(scaled(v, -1.0)) - nv) / std::max(1.0, nv);
    const double tri = (nv + nw - eval(sum)) / std::max(1.0, nv + nw);
    const double pos = nv > 0.0 ? 0.0 : -1.0;
    const double worst = std::min({hom, sym, tri, pos});
    rep.observe(worst, t, [&] {
      const char* axiom = worst == hom ? "homogeneity" : worst == sym ? "symmetry" : worst == tri ? "triangle" : "positivity";
      return Json{{"axiom", axiom}, {"v", v}, {"w", w}, {"alpha", alpha}};
    });
  }
  return rep;
}

}  // namespace detail

/// Samples the norm axioms on random vectors with log-uniform magnitudes in [1e-3, 1e3].
inline CheckReport validate_norm(const NormSpec& spec, std::size_t samples, std::uint64_t seed,
                                 double tol = 1e-9) {
  if (samples < 1) throw PreconditionError("validate_norm: samples must be at least 1");
  using V = std::array<double, 2>;
  auto draw = [](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> ang(0.0, kTwoPi), mag(-3.0, 3.0);
    const double t = ang(rng), r = std::pow(10.0, mag(rng));
    return V{r * std::cos(t), r * std::sin(t)};
  };
  auto eval = [&](const V& v) { return spec(Vec2{v[0], v[1]}); };
  return detail::sample_norm_axioms<V>(eval, draw, samples, seed, tol);
}

inline CheckReport validate_norm(const NormSpecN& spec, std::size_t samples, std::uint64_t seed,
                                 double tol = 1e-9) {
  if (samples < 1) throw PreconditionError("validate_norm: samples must be at least 1");
  const std::size_t n = spec.dim();
  auto draw = [n](std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> mag(-3.0, 3.0);
    VecN v(n);
    double len = 0.0;
    for (auto& c : v) c = g(rng), len += c * c;
    const double r = std::pow(10.0, mag(rng)) / std::sqrt(std::max(len, 1e-300));
    for (auto& c : v) c *= r;
    return v;
  };
  auto eval = [&](const VecN& v) { return spec(v); };
  return detail::sample_norm_axioms<VecN>(eval, draw, samples, seed, tol);
}

}  // namespace unisphere
