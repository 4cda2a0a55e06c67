#pragma once
/**
 * @file verify.hpp
 * @brief Sampled checks of the planar sphere-metric inequalities, and a worst-ratio search.
 *
 * Every check follows one pattern: a sampler draws the parameters of a trial
 * (angles, interpolation weights, ...) as a small JSON object, and an
 * evaluator turns those parameters into a signed margin. The worst trial's
 * parameters become the report's witness, so replay_margin() can re-evaluate
 * it standalone. Trial t draws from its own generator seeded by (seed, t);
 * results do not depend on evaluation order.
 *
 * Checks and their margins (x, y on S_X, sigma(x) = x/|x|, K the sandwich
 * constant of a normalized ball B_E ⊆ B_X ⊆ K B_E, beta = acos(1/K)):
 *
 *   euclidean-arc     on l2: -|d - 2 asin(|x-y|/2)|, and |x-y| <= d <= pi/2 |x-y|
 *   tangent-lines     <t x + (1-t) tau, tau> = 1 for all t; norm <= 1 on [0,1];
 *                     norm >= 1 beyond x; <c, y> <= 1 for contacts c ∈ S_X ∩ S_E
 *   angles            angle(v - x, y - x) <= beta, v = x + perp(x toward y),
 *                     for angle(x, y) <= beta
 *   estimate-segment  |x - y| <= K^2 |sigma x - sigma y| for angle(x, y) <= beta
 *   norm-decreasing   |sigma x - sigma y| <= |x - y|
 *   k-bound           ||x-y|| <= d(x, y) <= K^3 pi/2 ||x-y||
 *   sqrt2pi-bound     ||x-y|| <= d(x, y) <= sqrt(2) pi ||x-y||, after the John change of basis
 *   constant-two      d(x, y) <= 2 ||x-y||  (the sharp constant; reported separately)
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <type_traits>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"
#include "john.hpp"
#include "metric.hpp"
#include "norm_json.hpp"
#include "norms.hpp"
#include "report.hpp"

namespace unisphere {

inline constexpr double kGeometricTol = 1e-9;
/// Checks built on arc lengths carry ten times the arc tolerance.
inline constexpr double kCheckArcTol = kDefaultArcTol;
inline constexpr double kArcCheckTol = 10.0 * kCheckArcTol;

inline constexpr const char* kEuclideanArc = "euclidean-arc";
inline constexpr const char* kTangentLines = "tangent-lines";
inline constexpr const char* kAngles = "angles";
inline constexpr const char* kEstimateSegment = "estimate-segment";
inline constexpr const char* kNormDecreasing = "norm-decreasing";
inline constexpr const char* kKBound = "k-bound";
inline constexpr const char* kSqrt2PiBound = "sqrt2pi-bound";
inline constexpr const char* kConstantTwo = "constant-two";

/// All check names, sorted.
inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{kAngles,         kConstantTwo, kEstimateSegment, kEuclideanArc,
                                              kKBound,         kNormDecreasing, kSqrt2PiBound, kTangentLines};
  return names;
}

/// splitmix64 finalizer; decorrelates per-trial seeds.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t trial) {
  return std::mt19937_64(mix_seed(seed, trial));
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

struct Outcome {
  double margin;
  std::string item;
};

/// Everything a check needs that depends only on the norm; rebuilt identically on replay.
struct CheckContext {
  NormSpec spec;           ///< the ball the trials run on
  double k{1.0};           ///< B_E ⊆ B_X ⊆ k B_E
  double beta{0.0};        ///< acos(1/k)
  std::vector<double> contacts;  ///< polar angles of S_X ∩ S_E (tangent-lines only)
  std::shared_ptr<const ArcLengthTable> arcs;  ///< arc lengths on spec (metric-bound checks only)

  DistanceResult distance(Vec2 x, Vec2 y) const {
    return arcs ? arcs->distance(x, y, kCheckArcTol) : intrinsic_distance(spec, x, y, kCheckArcTol);
  }
};

inline std::shared_ptr<const ArcLengthTable> arc_table(const NormSpec& spec) {
  ArcOptions opt;
  opt.tol = kCheckArcTol;
  return std::make_shared<const ArcLengthTable>(spec, opt);
}

namespace detail {

inline double number_at(const Json& j, const char* key) { return j.at(key).get<double>(); }

template <class Sampler, class Evaluator>
CheckReport run_check(const std::string& name, double tol, std::size_t trials, std::uint64_t seed,
                      Sampler&& sample, Evaluator&& evaluate) {
  CheckReport rep(name, tol);
  for (std::size_t t = 0; t < trials; ++t) {
    ++rep.trials;
    auto rng = trial_rng(seed, t);
    std::optional<Json> params = sample(rng);
    if (!params) continue;  // outside the check's hypothesis window
    Outcome o;
    if constexpr (std::is_invocable_v<Evaluator&, const Json&, std::size_t>)
      o = evaluate(*params, t);
    else
      o = evaluate(*params);
    rep.observe(o.margin, t, [&] {
      Json w = *params;
      w["item"] = o.item;
      w["margin"] = o.margin;
      return w;
    });
  }
  return rep;
}

inline Outcome worst(std::initializer_list<Outcome> outcomes) {
  Outcome w = *outcomes.begin();
  for (const auto& o : outcomes)
    if (o.margin < w.margin || std::isnan(o.margin)) w = o;
  return w;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// contexts

/// Requires B_E ⊆ B_X (up to 1e-9) and returns the context with K = R.
inline CheckContext normalized_context(const NormSpec& spec) {
  const auto sc = sandwich_constants(spec);
  if (sc.r < 1.0 - kGeometricTol)
    throw PreconditionError("check requires a normalized norm (unit disk inside the unit ball); got r = " +
                            std::to_string(sc.r));
  const double k = std::max(1.0, sc.R);
  return {spec, k, std::acos(std::clamp(1.0 / k, -1.0, 1.0)), {}, nullptr};
}

/// The norm in coordinates where its John ellipse is the unit disk.
inline CheckContext john_context(const NormSpec& spec) {
  const NormSpec pushed = push_forward(spec, inner_john_ellipse(spec));
  const auto sc = sandwich_constants(pushed);
  const double k = sc.R;
  return {pushed, k, std::acos(std::clamp(1.0 / std::max(1.0, k), -1.0, 1.0)), {}, arc_table(pushed)};
}

// ---------------------------------------------------------------------------
// evaluators (pure functions of context and trial parameters)

namespace eval {

inline Outcome euclidean_arc(const Json& p) {
  const NormSpec l2 = NormSpec::lp(2.0);
  const Vec2 x = unit_direction(detail::number_at(p, "theta_x"));
  const Vec2 y = unit_direction(detail::number_at(p, "theta_y"));
  const double d = intrinsic_distance(l2, sphere_point(l2, angle_of(x)), sphere_point(l2, angle_of(y)), kCheckArcTol).value;
  const double chord = norm_e(x - y);
  return detail::worst({{-std::abs(d - euclidean_intrinsic_oracle(x, y)), "oracle"},
                        {d - chord, "chord-lower-bound"},
                        {kPi / 2.0 * chord - d, "half-pi-upper-bound"}});
}

inline Outcome tangent_lines(const CheckContext& ctx, const Json& p) {
  const Vec2 x = sphere_point(ctx.spec, detail::number_at(p, "theta_x"));
  const double orient = detail::number_at(p, "orient");
  const auto td = tangent_points(x, orient * rotate_ccw(x));
  const double t_any = detail::number_at(p, "t_any");
  const double t_in = detail::number_at(p, "t_in");
  const double t_out = detail::number_at(p, "t_out");
  auto line = [&](double t, Vec2 tau) { return t * x + (1.0 - t) * tau; };

  Outcome w{std::numeric_limits<double>::infinity(), ""};
  auto take = [&](Outcome o) {
    if (o.margin < w.margin || std::isnan(o.margin)) w = o;
  };
  for (const auto& [tau, label] : {std::pair{td.tau, std::string("tau")}, std::pair{td.tau2, std::string("tau2")}}) {
    take({-std::abs(dot(line(t_any, tau), tau) - 1.0), "inner-product-one/" + label});
    take({1.0 - ctx.spec(line(t_in, tau)), "inside-between/" + label});
    take({ctx.spec(line(t_out, tau)) - 1.0, "outside-beyond/" + label});
    take({-std::abs(dot(x - tau, tau)), "tangency/" + label});
  }
  if (auto it = p.find("contact"); it != p.end()) {
    const Vec2 c = sphere_point(ctx.spec, it->get<double>());
    const Vec2 y = sphere_point(ctx.spec, detail::number_at(p, "theta_y"));
    take({1.0 - dot(c, y), "contact-functional"});
  }
  return w;
}

inline Outcome angles(const CheckContext& ctx, const Json& p) {
  const Vec2 x = sphere_point(ctx.spec, detail::number_at(p, "theta_x"));
  const Vec2 y = sphere_point(ctx.spec, detail::number_at(p, "theta_y"));
  const Vec2 v = x + perp(x, y);
  return {ctx.beta - angle_between(x, v, y), "angle-to-normal"};
}

inline Outcome estimate_segment(const CheckContext& ctx, const Json& p) {
  const Vec2 x = sphere_point(ctx.spec, detail::number_at(p, "theta_x"));
  const Vec2 y = sphere_point(ctx.spec, detail::number_at(p, "theta_y"));
  return {ctx.k * ctx.k * norm_e(radial_project(x) - radial_project(y)) - norm_e(x - y), "k-squared-projection"};
}

inline Outcome norm_decreasing(const CheckContext& ctx, const Json& p) {
  const Vec2 x = sphere_point(ctx.spec, detail::number_at(p, "theta_x"));
  const Vec2 y = sphere_point(ctx.spec, detail::number_at(p, "theta_y"));
  return {norm_e(x - y) - norm_e(radial_project(x) - radial_project(y)), "projection-contracts"};
}

/// Lower bound, upper bound `constant * chord`, with the ratio reported alongside.
inline Outcome metric_bounds(const CheckContext& ctx, const Json& p, double constant, double* ratio = nullptr) {
  const Vec2 x = sphere_point(ctx.spec, detail::number_at(p, "theta_x"));
  const Vec2 y = sphere_point(ctx.spec, detail::number_at(p, "theta_y"));
  const double d = ctx.distance(x, y).value;
  const double chord = ctx.spec(x - y);
  if (ratio) *ratio = chord > 0.0 ? d / chord : 1.0;
  return detail::worst({{d - chord, "chord-lower-bound"}, {constant * chord - d, "upper-bound"}});
}

inline double k_bound_constant(const CheckContext& ctx) { return ctx.k * ctx.k * ctx.k * kPi / 2.0; }
inline const double kSqrt2Pi = std::sqrt(2.0) * kPi;

}  // namespace eval

// ---------------------------------------------------------------------------
// samplers

namespace sample {

inline Json pair(std::mt19937_64& rng) {
  return Json{{"theta_x", uniform(rng, 0.0, kTwoPi)}, {"theta_y", uniform(rng, 0.0, kTwoPi)}};
}

/// Pair with polar-angle separation at most beta; none when the window is (numerically) empty.
inline std::optional<Json> windowed_pair(std::mt19937_64& rng, double beta) {
  const double tx = uniform(rng, 0.0, kTwoPi);
  const double delta = uniform(rng, -1.0, 1.0) * beta;
  if (std::abs(delta) < 1e-9) return std::nullopt;
  return Json{{"theta_x", tx}, {"theta_y", numeric::wrap_angle(tx + delta)}};
}

}  // namespace sample

// ---------------------------------------------------------------------------
// checks

inline CheckReport check_euclidean_arc(std::size_t trials, std::uint64_t seed) {
  auto rep = detail::run_check(
      kEuclideanArc, kArcCheckTol, trials, seed,
      [](std::mt19937_64& rng) -> std::optional<Json> {
        Json p = sample::pair(rng);
        if (p["theta_x"] == p["theta_y"]) return std::nullopt;
        return p;
      },
      eval::euclidean_arc);
  rep.extra["norm"] = to_json(NormSpec::lp(2.0));
  return rep;
}

inline CheckContext tangent_context(const NormSpec& spec) {
  CheckContext ctx = normalized_context(spec);
  ctx.contacts = sphere_circle_contacts(spec);
  return ctx;
}

inline CheckReport check_lemma_tangent_lines(const NormSpec& spec, std::size_t trials, std::uint64_t seed) {
  const CheckContext ctx = tangent_context(spec);
  return detail::run_check(
      kTangentLines, kGeometricTol, trials, seed,
      [&](std::mt19937_64& rng) -> std::optional<Json> {
        Json p{{"theta_x", uniform(rng, 0.0, kTwoPi)},
               {"orient", uniform(rng, 0.0, 1.0) < 0.5 ? -1.0 : 1.0},
               {"t_any", uniform(rng, -10.0, 10.0)},
               {"t_in", uniform(rng, 0.0, 1.0)},
               {"t_out", uniform(rng, std::nextafter(1.0, 2.0), 10.0)},
               {"theta_y", uniform(rng, 0.0, kTwoPi)}};
        if (!ctx.contacts.empty()) {
          const auto i = std::uniform_int_distribution<std::size_t>(0, ctx.contacts.size() - 1)(rng);
          p["contact"] = ctx.contacts[i];
        }
        return p;
      },
      [&](const Json& p) { return eval::tangent_lines(ctx, p); });
}

inline CheckReport check_lemma_angles(const NormSpec& spec, std::size_t trials, std::uint64_t seed) {
  const CheckContext ctx = normalized_context(spec);
  auto rep = detail::run_check(
      kAngles, kGeometricTol, trials, seed,
      [&](std::mt19937_64& rng) { return sample::windowed_pair(rng, ctx.beta); },
      [&](const Json& p) { return eval::angles(ctx, p); });
  rep.extra["k"] = ctx.k;
  return rep;
}

inline CheckReport check_estimate_segment(const NormSpec& spec, std::size_t trials, std::uint64_t seed) {
  const CheckContext ctx = normalized_context(spec);
  auto rep = detail::run_check(
      kEstimateSegment, kGeometricTol, trials, seed,
      [&](std::mt19937_64& rng) { return sample::windowed_pair(rng, ctx.beta); },
      [&](const Json& p) { return eval::estimate_segment(ctx, p); });
  rep.extra["k"] = ctx.k;
  return rep;
}

inline CheckReport check_norm_decreasing(const NormSpec& spec, std::size_t trials, std::uint64_t seed) {
  const CheckContext ctx = normalized_context(spec);
  return detail::run_check(
      kNormDecreasing, kGeometricTol, trials, seed,
      [](std::mt19937_64& rng) -> std::optional<Json> { return sample::pair(rng); },
      [&](const Json& p) { return eval::norm_decreasing(ctx, p); });
}

/// Upper/lower metric bounds on random pairs; records the largest observed ratio.
inline CheckReport check_metric_bounds(const std::string& name, const CheckContext& ctx, double constant,
                                       std::size_t trials, std::uint64_t seed) {
  double max_ratio = 1.0;
  auto rep = detail::run_check(
      name, kArcCheckTol, trials, seed,
      [](std::mt19937_64& rng) -> std::optional<Json> {
        Json p = sample::pair(rng);
        if (p["theta_x"] == p["theta_y"]) return std::nullopt;
        return p;
      },
      [&](const Json& p) {
        double ratio = 1.0;
        const Outcome o = eval::metric_bounds(ctx, p, constant, &ratio);
        max_ratio = std::max(max_ratio, ratio);
        return o;
      });
  rep.extra["k"] = ctx.k;
  rep.extra["bound"] = constant;
  rep.extra["max_ratio"] = max_ratio;
  return rep;
}

inline CheckContext k_bound_context(const NormSpec& spec) {
  CheckContext ctx = normalized_context(normalize_norm(spec).spec);
  ctx.arcs = arc_table(ctx.spec);
  return ctx;
}

/// Normalizes spec, then checks ||x-y|| <= d <= K^3 pi/2 ||x-y||.
inline CheckReport check_theorem_k_bound(const NormSpec& spec, std::size_t trials, std::uint64_t seed) {
  CheckContext ctx = k_bound_context(spec);
  return check_metric_bounds(kKBound, ctx, eval::k_bound_constant(ctx), trials, seed);
}

struct MainTheoremReports {
  CheckReport sqrt2pi;
  CheckReport constant_two;
};

/// Moves spec to John coordinates (K <= sqrt 2), then checks the sqrt(2) pi bound and, separately, the constant 2.
inline MainTheoremReports check_main_theorem(const NormSpec& spec, std::size_t trials, std::uint64_t seed) {
  const CheckContext ctx = john_context(spec);
  // Both reports see the same pairs; distances are computed once.
  double max_ratio = 1.0;
  CheckReport two(kConstantTwo, kArcCheckTol);
  auto main = detail::run_check(
      kSqrt2PiBound, kArcCheckTol, trials, seed,
      [](std::mt19937_64& rng) -> std::optional<Json> {
        Json p = sample::pair(rng);
        if (p["theta_x"] == p["theta_y"]) return std::nullopt;
        return p;
      },
      [&](const Json& p, std::size_t t) {
        double ratio = 1.0;
        const Outcome o = eval::metric_bounds(ctx, p, eval::kSqrt2Pi, &ratio);
        max_ratio = std::max(max_ratio, ratio);
        // ratio <= 2  <=>  2 chord - d >= 0; scale by chord to keep the margin in distance units.
        const Vec2 x = sphere_point(ctx.spec, detail::number_at(p, "theta_x"));
        const Vec2 y = sphere_point(ctx.spec, detail::number_at(p, "theta_y"));
        const double chord = ctx.spec(x - y);
        two.observe((2.0 - ratio) * chord, t, [&] {
          Json w = p;
          w["item"] = "constant-two";
          w["margin"] = (2.0 - ratio) * chord;
          return w;
        });
        return o;
      });
  two.trials = main.trials;
  for (auto* r : {&main, &two}) {
    r->extra["k"] = ctx.k;
    r->extra["max_ratio"] = max_ratio;
  }
  main.extra["bound"] = eval::kSqrt2Pi;
  two.extra["bound"] = 2.0;
  return {std::move(main), std::move(two)};
}

// ---------------------------------------------------------------------------
// replay

/// Rebuilds the context a named check would use for spec.
inline CheckContext context_for(const std::string& name, const NormSpec& spec) {
  if (name == kTangentLines) return tangent_context(spec);
  if (name == kAngles || name == kEstimateSegment || name == kNormDecreasing) return normalized_context(spec);
  if (name == kKBound) return k_bound_context(spec);
  if (name == kSqrt2PiBound || name == kConstantTwo) return john_context(spec);
  if (name == kEuclideanArc) return {NormSpec::lp(2.0), 1.0, 0.0, {}, nullptr};
  throw PreconditionError("unknown check \"" + name + "\"");
}

/// Re-evaluates a witness standalone; returns its margin.
inline double replay_margin(const std::string& name, const NormSpec& spec, const Json& witness) {
  const CheckContext ctx = context_for(name, spec);
  if (name == kEuclideanArc) return eval::euclidean_arc(witness).margin;
  if (name == kTangentLines) return eval::tangent_lines(ctx, witness).margin;
  if (name == kAngles) return eval::angles(ctx, witness).margin;
  if (name == kEstimateSegment) return eval::estimate_segment(ctx, witness).margin;
  if (name == kNormDecreasing) return eval::norm_decreasing(ctx, witness).margin;
  if (name == kKBound) return eval::metric_bounds(ctx, witness, eval::k_bound_constant(ctx)).margin;
  if (name == kSqrt2PiBound) return eval::metric_bounds(ctx, witness, eval::kSqrt2Pi).margin;
  double ratio = 1.0;
  eval::metric_bounds(ctx, witness, eval::kSqrt2Pi, &ratio);
  const Vec2 x = sphere_point(ctx.spec, detail::number_at(witness, "theta_x"));
  const Vec2 y = sphere_point(ctx.spec, detail::number_at(witness, "theta_y"));
  return (2.0 - ratio) * ctx.spec(x - y);
}

// ---------------------------------------------------------------------------
// suites

/// Runs the named checks on spec. Lemma-level checks run on the normalized ball.
/// Reports come back sorted by name.
inline std::vector<CheckReport> run_suite(const NormSpec& spec, std::vector<std::string> names, std::size_t trials,
                                          std::uint64_t seed) {
  if (names.empty() || (names.size() == 1 && names[0] == "all")) names = suite_names();
  for (const auto& n : names)
    if (std::find(suite_names().begin(), suite_names().end(), n) == suite_names().end())
      throw PreconditionError("unknown suite \"" + n + "\"");
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());

  const NormSpec normalized = normalize_norm(spec).spec;
  std::map<std::string, CheckReport> out;
  auto wants = [&](const char* n) { return std::find(names.begin(), names.end(), n) != names.end(); };
  if (wants(kEuclideanArc)) out[kEuclideanArc] = check_euclidean_arc(trials, seed);
  if (wants(kTangentLines)) out[kTangentLines] = check_lemma_tangent_lines(normalized, trials, seed);
  if (wants(kAngles)) out[kAngles] = check_lemma_angles(normalized, trials, seed);
  if (wants(kEstimateSegment)) out[kEstimateSegment] = check_estimate_segment(normalized, trials, seed);
  if (wants(kNormDecreasing)) out[kNormDecreasing] = check_norm_decreasing(normalized, trials, seed);
  if (wants(kKBound)) out[kKBound] = check_theorem_k_bound(spec, trials, seed);
  if (wants(kSqrt2PiBound) || wants(kConstantTwo)) {
    auto main = check_main_theorem(spec, trials, seed);
    if (wants(kSqrt2PiBound)) out[kSqrt2PiBound] = std::move(main.sqrt2pi);
    if (wants(kConstantTwo)) out[kConstantTwo] = std::move(main.constant_two);
  }
  std::vector<CheckReport> reports;
  for (auto& [name, rep] : out) reports.push_back(std::move(rep));
  return reports;
}

// ---------------------------------------------------------------------------
// random norms

enum class NormFamily { lp, polygon, ellipse, mixed };

inline std::optional<NormFamily> parse_family(const std::string& s) {
  if (s == "lp") return NormFamily::lp;
  if (s == "polygon") return NormFamily::polygon;
  if (s == "ellipse") return NormFamily::ellipse;
  if (s == "mixed") return NormFamily::mixed;
  return std::nullopt;
}

inline const char* to_string(NormFamily f) {
  switch (f) {
    case NormFamily::lp: return "lp";
    case NormFamily::polygon: return "polygon";
    case NormFamily::ellipse: return "ellipse";
    case NormFamily::mixed: return "mixed";
  }
  return "?";
}

/// Counterclockwise convex hull, collinear points dropped (Andrew's monotone chain).
inline std::vector<Vec2> convex_hull(std::vector<Vec2> pts, double eps = 0.0) {
  std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Vec2> hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= eps) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= eps) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

/// One random norm from a family. Polygons: symmetrized hull of 2..8 random directions with
/// radii in [1, 2]. Ellipses: random rotation, eigenvalues with condition number <= 100.
/// l_p: p = inf or 1 with probability 0.1 each, otherwise log-uniform in [1.1, 20].
/// `index` selects the family for `mixed` (lp, polygon, ellipse in turn).
inline NormSpec random_norm(NormFamily family, std::mt19937_64& rng, std::size_t index = 0) {
  if (family == NormFamily::mixed) {
    constexpr NormFamily cycle[3] = {NormFamily::polygon, NormFamily::ellipse, NormFamily::lp};
    family = cycle[index % 3];
  }
  switch (family) {
    case NormFamily::lp: {
      const double u = uniform(rng, 0.0, 1.0);
      if (u < 0.1) return NormSpec::lp_infinity();
      if (u < 0.2) return NormSpec::lp(1.0);
      return NormSpec::lp(std::exp(uniform(rng, std::log(1.1), std::log(20.0))));
    }
    case NormFamily::ellipse: {
      const double l1 = std::exp(uniform(rng, std::log(0.25), std::log(4.0)));
      const double l2 = l1 * std::exp(uniform(rng, 0.0, std::log(100.0)));
      const double phi = uniform(rng, 0.0, kPi);
      const double c = std::cos(phi), s = std::sin(phi);
      const Mat2 r{c, -s, s, c};
      const Mat2 m = r * Mat2::diag(l1, l2) * r.transpose();
      return NormSpec::ellipse(Mat2::symmetric(m.a, 0.5 * (m.b + m.c), m.d));
    }
    default: {
      for (;;) {
        const int count = std::uniform_int_distribution<int>(2, 8)(rng);
        std::vector<Vec2> pts;
        for (int j = 0; j < count; ++j) {
          const Vec2 p = uniform(rng, 1.0, 2.0) * unit_direction(uniform(rng, 0.0, kTwoPi));
          pts.push_back(p);
          pts.push_back(-p);
        }
        try {
          return NormSpec::polygon(convex_hull(std::move(pts), 1e-9));
        } catch (const InvalidNorm&) {
          // near-collinear or degenerate draw; draw again
        }
      }
    }
  }
}

// ---------------------------------------------------------------------------
// worst-ratio search

struct RatioSearchResult {
  double best_ratio{1.0};
  NormSpec norm = NormSpec::lp(2.0);
  Vec2 x;
  Vec2 y;
  std::size_t trials{0};
  NormFamily family{NormFamily::mixed};

  Json to_json() const {
    return Json{{"best_ratio", best_ratio}, {"family", to_string(family)}, {"norm", unisphere::to_json(norm)},
                {"x", unisphere::to_json(x)},   {"y", unisphere::to_json(y)},  {"trials", trials}};
  }
};

inline constexpr double kSearchArcTol = 1e-6;

/// Random restarts over the family and the two angles, each polished by coordinate-wise golden section.
/// The winning pair is re-evaluated at the default arc tolerance.
inline RatioSearchResult ratio_search(NormFamily family, std::size_t budget, std::uint64_t seed) {
  if (budget < 1) throw PreconditionError("ratio_search: budget must be at least 1");
  struct Best {
    double ratio{-1.0};
    std::size_t trial{0};
    double tx{0.0}, ty{0.0};
    std::optional<NormSpec> norm;
  } best;

  for (std::size_t t = 0; t < budget; ++t) {
    auto rng = trial_rng(seed, t);
    const NormSpec spec = random_norm(family, rng, t);
    ArcOptions opt;
    opt.tol = kSearchArcTol;
    const ArcLengthTable arcs(spec, opt);
    auto ratio = [&](double tx, double ty) {
      const double gap = numeric::wrap_angle(ty - tx);
      if (gap < 1e-9 || kTwoPi - gap < 1e-9) return 1.0;
      return arcs.ratio(sphere_point(spec, tx), sphere_point(spec, ty));
    };
    double tx = uniform(rng, 0.0, kTwoPi), ty = uniform(rng, 0.0, kTwoPi);
    double r = ratio(tx, ty);
    for (int round = 0; round < 2; ++round) {
      const auto mx = numeric::golden_section_max([&](double s) { return ratio(s, ty); }, tx - 0.5, tx + 0.5, 1e-4);
      if (mx.value > r) r = mx.value, tx = mx.arg;
      const auto my = numeric::golden_section_max([&](double s) { return ratio(tx, s); }, ty - 0.5, ty + 0.5, 1e-4);
      if (my.value > r) r = my.value, ty = my.arg;
    }
    if (r > best.ratio) best = {r, t, tx, ty, spec};
  }

  RatioSearchResult res;
  res.norm = *best.norm;
  res.x = sphere_point(res.norm, best.tx);
  res.y = sphere_point(res.norm, best.ty);
  res.best_ratio = res.x == res.y ? 1.0 : distance_ratio(res.norm, res.x, res.y);
  res.trials = budget;
  res.family = family;
  return res;
}

}  // namespace unisphere
