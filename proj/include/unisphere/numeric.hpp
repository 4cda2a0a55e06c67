#pragma once
/**
 * @file numeric.hpp
 * @brief One-dimensional search helpers: golden-section extremum and bisection.
 */

#include <cmath>
#include <utility>

namespace unisphere::numeric {

inline constexpr double kInvPhi = 0.6180339887498948482;  // 1/phi

struct Extremum {
  double arg;
  double value;
};

/// Minimum of f on [lo, hi], assuming f is unimodal there. Stops when the bracket is below x_tol.
template <class F>
Extremum golden_section_min(F&& f, double lo, double hi, double x_tol = 1e-10, int max_iter = 200) {
  double x1 = hi - kInvPhi * (hi - lo);
  double x2 = lo + kInvPhi * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int it = 0; it < max_iter && hi - lo > x_tol; ++it) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? Extremum{x1, f1} : Extremum{x2, f2};
}

template <class F>
Extremum golden_section_max(F&& f, double lo, double hi, double x_tol = 1e-10, int max_iter = 200) {
  auto r = golden_section_min([&](double t) { return -f(t); }, lo, hi, x_tol, max_iter);
  return {r.arg, -r.value};
}

/// Root of f in [lo, hi] given f(lo) and f(hi) of opposite sign (or zero).
template <class F>
double bisect(F&& f, double lo, double hi, double x_tol = 1e-12, int max_iter = 200) {
  double flo = f(lo);
  for (int it = 0; it < max_iter && hi - lo > x_tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Angle reduced to [0, 2*pi).
inline double wrap_angle(double theta) {
  constexpr double two_pi = 6.283185307179586476925;
  double t = std::fmod(theta, two_pi);
  if (t < 0.0) t += two_pi;
  if (t >= two_pi) t = 0.0;
  return t;
}

}  // namespace unisphere::numeric
