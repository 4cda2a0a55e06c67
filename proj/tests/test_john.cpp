#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "unisphere/john.hpp"
#include "unisphere/verify.hpp"

using namespace unisphere;

namespace {

void expect_matrix_near(const Mat2& got, const Mat2& want, double tol) {
  EXPECT_NEAR(got.a, want.a, tol);
  EXPECT_NEAR(got.b, want.b, tol);
  EXPECT_NEAR(got.c, want.c, tol);
  EXPECT_NEAR(got.d, want.d, tol);
}

double max_facet_reach(const Mat2& l, const std::vector<Vec2>& facets) {
  double worst = 0.0;
  for (const auto& a : facets) worst = std::max(worst, norm_e(l * a));
  return worst;
}

/// Largest det L over a plain grid of symmetric L = [[a, b], [b, c]] with |L a_i| <= 1 for
/// every facet functional, refined repeatedly around the best cell. Independent of the solver.
double grid_best_det(const std::vector<Vec2>& facets, double scale) {
  double best = 0.0, ba = scale / 2, bb = 0.0, bc = scale / 2, step = scale / 40.0;
  for (int round = 0; round < 7; ++round) {
    const double ca = ba, cb = bb, cc = bc;
    for (int i = -40; i <= 40; ++i)
      for (int j = -40; j <= 40; ++j)
        for (int k = -40; k <= 40; ++k) {
          const double a = ca + i * step, b = cb + j * step, c = cc + k * step;
          const Mat2 l = Mat2::symmetric(a, b, c);
          if (a <= 0.0 || l.det() <= best) continue;
          if (max_facet_reach(l, facets) <= 1.0) best = l.det(), ba = a, bb = b, bc = c;
        }
    step /= 8.0;
  }
  return best;
}

NormSpec random_polygon(std::mt19937_64& rng) { return random_norm(NormFamily::polygon, rng, 0); }

}  // namespace

TEST(Ellipse, BasicAccessors) {
  const Ellipse e = Ellipse::from_matrix(Mat2::symmetric(4.0, 0.0, 1.0));
  EXPECT_NEAR(e.area(), kPi / 2.0, 1e-15);
  EXPECT_DOUBLE_EQ(e.norm({1, 0}), 2.0);
  const Mat2 l = e.shape();
  expect_matrix_near(l, Mat2::symmetric(0.5, 0.0, 1.0), 1e-15);
  expect_matrix_near(Ellipse::from_shape(l).matrix(), e.matrix(), 1e-14);
  EXPECT_EQ(e.to_json().dump(), R"({"m":[[4.0,0.0],[0.0,1.0]]})");
  EXPECT_THROW(Ellipse::from_matrix(Mat2::symmetric(1.0, 2.0, 1.0)), InvalidNorm);
  EXPECT_THROW(Ellipse::from_matrix(Mat2{1.0, 0.5, 0.0, 1.0}), InvalidNorm);
}

TEST(InnerJohn, SquareGivesUnitDisk) {
  const Ellipse e = inner_john_ellipse(NormSpec::lp_infinity());
  expect_matrix_near(e.matrix(), Mat2::identity(), 1e-6);
  EXPECT_NEAR(e.area(), kPi, 1e-6);
}

TEST(InnerJohn, RectangleGivesAxisEllipse) {
  const NormSpec rect = NormSpec::polygon({{2, 1}, {-2, 1}, {-2, -1}, {2, -1}});
  const Ellipse e = inner_john_ellipse(rect);
  expect_matrix_near(e.matrix(), Mat2::symmetric(0.25, 0.0, 1.0), 1e-6);
  EXPECT_NEAR(e.area(), 2.0 * kPi, 1e-6);
}

TEST(InnerJohn, RoundAndDiamondBalls) {
  expect_matrix_near(inner_john_ellipse(NormSpec::lp(2.0)).matrix(), Mat2::identity(), 1e-6);
  expect_matrix_near(inner_john_ellipse(NormSpec::lp(1.0)).matrix(), Mat2::symmetric(2.0, 0.0, 2.0), 1e-6);
  const Mat2 m = Mat2::symmetric(3.0, 1.0, 2.0);
  expect_matrix_near(inner_john_ellipse(NormSpec::ellipse(m)).matrix(), m, 1e-12);
}

TEST(InnerJohn, RejectsTooFewFacetsForSmoothBalls) {
  EXPECT_THROW(inner_john_ellipse(NormSpec::lp(3.0), 4), PreconditionError);
  EXPECT_NO_THROW(inner_john_ellipse(NormSpec::lp_infinity(), 4));  // polygons use their own edges
  EXPECT_THROW(inner_john_ellipse(NormSpec::lp(3.0), 256, 0.0), PreconditionError);
}

TEST(InnerJohn, AreaMatchesBruteForceGrid) {
  std::mt19937_64 rng(8);
  for (int k = 0; k < 6; ++k) {
    const NormSpec spec = random_polygon(rng);
    const auto sol = solve_john(spec);
    const double grid = grid_best_det(sol.facets, 2.0 * sandwich_constants(spec).R);
    const double det = sol.shape.det();
    EXPECT_GE(det, grid * (1.0 - 1e-9)) << to_json(spec).dump();
    EXPECT_NEAR(det, grid, 1e-4 * grid) << to_json(spec).dump();
  }
}

TEST(InnerJohn, PerturbationNeverImprovesLogDet) {
  std::mt19937_64 rng(9);
  for (int k = 0; k < 10; ++k) {
    const NormSpec spec = k < 5 ? random_polygon(rng) : random_norm(NormFamily::lp, rng, k);
    const auto sol = solve_john(spec);
    const double base = std::log(sol.shape.det());
    for (int t = 0; t < 200; ++t) {
      double da = uniform(rng, -1, 1), db = uniform(rng, -1, 1), dc = uniform(rng, -1, 1);
      const double s = 1e-4 / std::sqrt(da * da + 2 * db * db + dc * dc);
      Mat2 l = sol.shape + Mat2::symmetric(da * s, db * s, dc * s);
      l = l * (1.0 / std::max(1.0, max_facet_reach(l, sol.facets)));
      EXPECT_LE(std::log(l.det()), base + 1e-6) << to_json(spec).dump();
    }
  }
}

TEST(InnerJohn, TouchesInAtLeastTwoAntipodalPairs) {
  std::mt19937_64 rng(10);
  for (int k = 0; k < 20; ++k) {
    const NormSpec spec = random_norm(NormFamily::mixed, rng, k);
    if (spec.get_if<NormSpec::Ellipse>()) continue;  // returned directly, no facets
    const auto sol = solve_john(spec);
    int active = 0;
    for (const auto& a : sol.facets) active += norm_e(sol.shape * a) >= 1.0 - 1e-6;
    EXPECT_GE(active, 2) << to_json(spec).dump();
  }
}

TEST(InnerJohn, AffineEquivarianceOnPolygons) {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 100; ++k) {
    const NormSpec poly = random_polygon(rng);
    Mat2 a{uniform(rng, -2, 2), uniform(rng, -2, 2), uniform(rng, -2, 2), uniform(rng, -2, 2)};
    if (std::abs(a.det()) < 0.2) a = a + Mat2::identity();
    if (std::abs(a.det()) < 0.2) continue;
    // ||v||' = ||A v|| has ball A^{-1} B, so its John ellipse is A^{-1} E with matrix A^T M A.
    const Mat2 m = inner_john_ellipse(poly).matrix();
    const Mat2 want = a.transpose() * m * a;
    const Mat2 got = inner_john_ellipse(NormSpec::linear(poly, a)).matrix();
    const double scale = std::max({std::abs(want.a), std::abs(want.d), 1.0});
    expect_matrix_near(got, want, 1e-6 * scale);
  }
}

TEST(VerifyJohn, SquareWithDiskIsTightAtCorners) {
  const auto cert = verify_john(NormSpec::lp_infinity(), Ellipse::from_matrix(Mat2::identity()));
  EXPECT_TRUE(cert.inner_ok);
  EXPECT_TRUE(cert.outer_ok);
  EXPECT_NEAR(cert.worst_outer_margin, 0.0, 1e-12);
  EXPECT_NEAR(std::abs(cert.outer_witness.x), 1.0, 1e-12);
  EXPECT_NEAR(std::abs(cert.outer_witness.y), 1.0, 1e-12);
  EXPECT_NEAR(cert.worst_inner_margin, 0.0, 1e-12);
}

TEST(VerifyJohn, CircleWithItselfHasZeroMargins) {
  const auto cert = verify_john(NormSpec::lp(2.0), Ellipse::from_matrix(Mat2::identity()));
  EXPECT_TRUE(cert.inner_ok);
  EXPECT_TRUE(cert.outer_ok);
  EXPECT_NEAR(cert.worst_inner_margin, 0.0, 1e-12);
  EXPECT_NEAR(cert.worst_outer_margin, std::sqrt(2.0) - 1.0, 1e-12);
}

TEST(VerifyJohn, DiamondTouchesAtEdgeMidpoints) {
  const auto cert = verify_john(NormSpec::lp(1.0), inner_john_ellipse(NormSpec::lp(1.0)));
  EXPECT_TRUE(cert.inner_ok);
  EXPECT_TRUE(cert.outer_ok);
  EXPECT_NEAR(cert.worst_inner_margin, 0.0, 1e-9);
  EXPECT_NEAR(std::abs(cert.inner_witness.x), 0.5, 1e-6);
  EXPECT_NEAR(std::abs(cert.inner_witness.y), 0.5, 1e-6);
}

TEST(VerifyJohn, CatchesEllipsesThatAreTooLargeOrTooSmall) {
  const NormSpec inf = NormSpec::lp_infinity();
  const auto big = verify_john(inf, Ellipse::from_matrix(Mat2::identity() * 0.8));
  EXPECT_FALSE(big.inner_ok);
  EXPECT_LT(big.worst_inner_margin, 0.0);
  const auto small = verify_john(inf, Ellipse::from_matrix(Mat2::identity() * 1.5));
  EXPECT_TRUE(small.inner_ok);
  EXPECT_FALSE(small.outer_ok);
  EXPECT_THROW(verify_john(inf, Ellipse::from_matrix(Mat2::identity()), 32), PreconditionError);
}

TEST(VerifyJohn, SandwichHoldsForRandomNorms) {
  std::mt19937_64 rng(12);
  for (int k = 0; k < 40; ++k) {
    const NormSpec spec = random_norm(NormFamily::mixed, rng, k);
    const auto cert = verify_john(spec, inner_john_ellipse(spec));
    EXPECT_TRUE(cert.inner_ok) << to_json(spec).dump() << " " << cert.worst_inner_margin;
    EXPECT_TRUE(cert.outer_ok) << to_json(spec).dump() << " " << cert.worst_outer_margin;
  }
}

TEST(EuclideanFromEllipse, Examples) {
  const NormSpec id = euclidean_from_ellipse(Ellipse::from_matrix(Mat2::identity()));
  EXPECT_NEAR(id({3, 4}), 5.0, 1e-15);
  EXPECT_NEAR(euclidean_from_ellipse(Ellipse::from_matrix(Mat2::symmetric(4, 0, 1)))({1, 0}), 2.0, 1e-15);
}

TEST(PushForward, RectangleBecomesSquare) {
  const NormSpec rect = NormSpec::polygon({{2, 1}, {-2, 1}, {-2, -1}, {2, -1}});
  const NormSpec square = push_forward(rect, inner_john_ellipse(rect));
  for (double t = 0.0; t < kTwoPi; t += 0.01) {
    const Vec2 u = unit_direction(t);
    EXPECT_NEAR(square(u), NormSpec::lp_infinity()(u), 1e-6);
  }
  EXPECT_NEAR(sandwich_constants(square).k, std::sqrt(2.0), 1e-6);
}

TEST(PushForward, JohnCoordinatesSatisfyTheSandwich) {
  std::mt19937_64 rng(13);
  for (int k = 0; k < 30; ++k) {
    const NormSpec spec = random_norm(NormFamily::mixed, rng, k);
    const auto sc = sandwich_constants(push_forward(spec, inner_john_ellipse(spec)));
    EXPECT_GE(sc.r, 1.0 - 1e-6) << to_json(spec).dump();
    EXPECT_LE(sc.R, std::sqrt(2.0) + 1e-6) << to_json(spec).dump();
  }
}
