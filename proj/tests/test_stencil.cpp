#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "mpsfd/geometry.hpp"
#include "mpsfd/random.hpp"
#include "mpsfd/stencil.hpp"

using namespace mpsfd;

namespace {

std::vector<Point> circle_example_offsets() {
  std::vector<Point> pts;
  for (double phi : {0.0, 1.0, 2.0, 3.0, 0.1, 0.2})
    pts.push_back({std::cos(std::numbers::pi / 2 * phi), std::sin(std::numbers::pi / 2 * phi), 0.0});
  return pts;
}

std::vector<Point> grid_candidates(int dim, double h) {
  std::vector<Point> pts;
  const int nz = dim == 3 ? 1 : 0;
  for (int k = -nz; k <= nz; ++k)
    for (int j = -1; j <= 1; ++j)
      for (int i = -1; i <= 1; ++i)
        if (i || j || k) pts.push_back({i * h, j * h, k * h});
  return pts;
}

}  // namespace

TEST(Constraints, ShapeAndValidation) {
  EXPECT_EQ(constraint_count(2, ConstraintKind::Laplace), 5);
  EXPECT_EQ(constraint_count(3, ConstraintKind::Laplace), 9);
  EXPECT_EQ(constraint_count(3, ConstraintKind::NeumannNormal), 3);
  const auto cs = build_constraints(circle_example_offsets(), 2, 4.0, ConstraintKind::Laplace);
  EXPECT_EQ(cs.rows(), 5u);
  EXPECT_EQ(cs.cols(), 6u);
  EXPECT_EQ(cs.rhs, (Eigen::VectorXd(5) << 0, 0, 0, 2, 2).finished());
  EXPECT_THROW(build_constraints(circle_example_offsets(), 2, 2.0, ConstraintKind::Laplace), std::invalid_argument);
  EXPECT_THROW(build_constraints(std::vector<Point>{}, 2, 4.0, ConstraintKind::Laplace), std::invalid_argument);
  EXPECT_THROW(build_constraints(std::vector<Point>{{1, 0, 0}, {0, 0, 0}}, 2, 4.0, ConstraintKind::Laplace),
               std::invalid_argument);
}

TEST(Lsq, CircleExampleGolden) {
  // Frozen from the numpy oracle; the printed values round to the published
  // (0.846, 1.005, 0.998, 1.003, 0.312, -0.164).
  const double expected[6] = {0.8459783500975123, 1.0049521570561035, 0.9980801007598897,
                              1.0030729419139361, 0.3118830982851977, -0.16396664811263892};
  const auto cs = build_constraints(circle_example_offsets(), 2, 4.0, ConstraintKind::Laplace);
  const auto st = lsq_stencil(cs);
  ASSERT_EQ(st.coefficients.size(), 6u);
  for (int i = 0; i < 6; ++i) EXPECT_NEAR(st.coefficients[static_cast<std::size_t>(i)], expected[i], 1e-12);
  EXPECT_FALSE(st.positive);
  EXPECT_LE(verify_consistency(st, stencil_offsets(st, cs), 2, ConstraintKind::Laplace), 1e-12);
}

TEST(Mps, CircleExamplePositive) {
  const auto cs = build_constraints(circle_example_offsets(), 2, 4.0, ConstraintKind::Laplace);
  const auto res = mps_stencil(cs);
  ASSERT_TRUE(std::holds_alternative<Stencil>(res));
  const auto& st = std::get<Stencil>(res);
  EXPECT_TRUE(st.positive);
  EXPECT_LE(st.neighbors.size(), 5u);
  EXPECT_NEAR(st.objective, 4.0, 1e-9);
  EXPECT_LE(verify_consistency(st, stencil_offsets(st, cs), 2, ConstraintKind::Laplace), 1e-12);
}

TEST(Mps, RecoversFivePointStencil) {
  for (double h : {1.0, 0.1, 1e-3}) {
    const auto cand = grid_candidates(2, h);
    const auto cs = build_constraints(cand, 2, 4.0, ConstraintKind::Laplace);
    const auto st = std::get<Stencil>(mps_stencil(cs));
    ASSERT_EQ(st.neighbors.size(), 4u);
    for (std::size_t t = 0; t < 4; ++t) {
      const auto& x = cand[st.neighbors[t]];
      EXPECT_EQ((x[0] != 0.0) + (x[1] != 0.0), 1);
      EXPECT_NEAR(st.coefficients[t] * h * h, 1.0, 1e-10);
    }
    EXPECT_NEAR(st.center_coefficient * h * h, -4.0, 1e-10);
  }
}

TEST(Mps, RecoversSevenPointStencil) {
  const double h = 0.05;
  const auto cand = grid_candidates(3, h);
  const auto cs = build_constraints(cand, 3, 4.0, ConstraintKind::Laplace);
  const auto st = std::get<Stencil>(mps_stencil(cs));
  ASSERT_EQ(st.neighbors.size(), 6u);
  for (double c : st.coefficients) EXPECT_NEAR(c * h * h, 1.0, 1e-10);
  EXPECT_NEAR(st.center_coefficient * h * h, -6.0, 1e-10);
}

TEST(Mps, HalfSpaceGivesCertificate) {
  std::vector<Point> pts;
  for (double a : {-80.0, -40.0, 0.0, 40.0, 80.0})
    for (double r : {0.5, 1.0}) pts.push_back({r * std::cos(a * std::numbers::pi / 180), r * std::sin(a * std::numbers::pi / 180), 0});
  EXPECT_FALSE(half_space_check(pts, 2));
  const auto cs = build_constraints(pts, 2, 4.0, ConstraintKind::Laplace);
  const auto res = mps_stencil(cs);
  ASSERT_TRUE(std::holds_alternative<InfeasibilityReport>(res));
  const auto& rep = std::get<InfeasibilityReport>(res);
  EXPECT_GE(rep.min_dual_slack, -1e-10);
  EXPECT_LT(rep.gap, 0.0);
  EXPECT_GE((cs.vandermonde.transpose() * rep.certificate).minCoeff(), -1e-10);
  EXPECT_NEAR(cs.rhs.dot(rep.certificate), rep.gap, 1e-14);
}

TEST(Mps, ScaleInvariance) {
  Rng rng(5);
  std::vector<Point> pts;
  for (int i = 0; i < 14; ++i) pts.push_back({rng.normal(), rng.normal(), 0});
  const auto a = std::get<Stencil>(mps_stencil(build_constraints(pts, 2, 4.0, ConstraintKind::Laplace)));
  for (auto& p : pts) p = 1e-3 * p;
  const auto b = std::get<Stencil>(mps_stencil(build_constraints(pts, 2, 4.0, ConstraintKind::Laplace)));
  ASSERT_EQ(a.neighbors, b.neighbors);
  for (std::size_t t = 0; t < a.coefficients.size(); ++t) EXPECT_NEAR(b.coefficients[t] * 1e-6, a.coefficients[t], 1e-9 * a.coefficients[t]);
  EXPECT_NEAR(b.objective, a.objective * 1e-6, 1e-9 * a.objective * 1e-6);
}

TEST(Mps, ConeCriterionImpliesFeasible) {
  const auto params = ConeCriterionParams::for_dimension(2);
  Rng rng(17);
  int checked = 0;
  while (checked < 500) {
    std::vector<Point> pts;
    const int m = 8 + static_cast<int>(rng.below(12));
    for (int i = 0; i < m; ++i) {
      const double a = rng.uniform(0, 2 * std::numbers::pi);
      const double r = rng.uniform(0.2, 1.0);
      pts.push_back({r * std::cos(a), r * std::sin(a), 0});
    }
    if (!cone_criterion_check(pts, params)) continue;
    ++checked;
    const auto res = mps_stencil(build_constraints(pts, 2, 4.0, ConstraintKind::Laplace));
    ASSERT_TRUE(std::holds_alternative<Stencil>(res)) << "case " << checked;
  }
}

TEST(Mps, MinimalityAndConsistencyOnRandomSets) {
  Rng rng(99);
  for (int t = 0; t < 200; ++t) {
    const int dim = t % 2 ? 3 : 2;
    std::vector<Point> pts;
    for (int i = 0; i < 30; ++i) pts.push_back({rng.normal(), rng.normal(), dim == 3 ? rng.normal() : 0.0});
    const auto cs = build_constraints(pts, dim, 4.0, ConstraintKind::Laplace);
    const auto res = mps_stencil(cs);
    if (!std::holds_alternative<Stencil>(res)) continue;
    const auto& st = std::get<Stencil>(res);
    EXPECT_LE(st.neighbors.size(), static_cast<std::size_t>(constraint_count(dim, ConstraintKind::Laplace)));
    EXPECT_TRUE(st.positive);
    EXPECT_LT(st.center_coefficient, 0.0);
    EXPECT_LE(verify_consistency(st, stencil_offsets(st, cs), dim, ConstraintKind::Laplace), 1e-9);
  }
}

TEST(Lsq, RankDeficientThrows) {
  // Collinear points cannot resolve the y-derivatives.
  const std::vector<Point> pts{{1, 0, 0}, {2, 0, 0}, {-1, 0, 0}, {-2, 0, 0}, {3, 0, 0}, {-3, 0, 0}};
  EXPECT_THROW(lsq_stencil(build_constraints(pts, 2, 4.0, ConstraintKind::Laplace)), RankDeficientError);
}

TEST(Lsq, ExactOnQuadratics) {
  Rng rng(6);
  std::vector<Point> pts;
  for (int i = 0; i < 25; ++i) pts.push_back({rng.normal(), rng.normal(), rng.normal()});
  const auto cs = build_constraints(pts, 3, 4.0, ConstraintKind::Laplace);
  const auto st = lsq_stencil(cs);
  EXPECT_LE(verify_consistency(st, stencil_offsets(st, cs), 3, ConstraintKind::Laplace), 1e-10);
}

TEST(Neumann, FirstAxisDerivative) {
  // Boundary point on a flat face; candidates on the face and inside.
  std::vector<Point> pts{{0, 1, 0}, {0, -1, 0}, {1, 0, 0}, {1, 1, 0}, {1, -1, 0}, {2, 0.5, 0}};
  const auto cs = build_constraints(pts, 2, 4.0, ConstraintKind::NeumannNormal, 0);
  for (Method m : {Method::Mps, Method::Lsq}) {
    const auto res = neumann_stencil(cs, m);
    ASSERT_TRUE(std::holds_alternative<Stencil>(res));
    const auto& st = std::get<Stencil>(res);
    EXPECT_LE(verify_consistency(st, stencil_offsets(st, cs), 2, ConstraintKind::NeumannNormal, 0), 1e-12);
    if (m == Method::Mps) {
      EXPECT_TRUE(st.positive);
      EXPECT_LE(st.neighbors.size(), 2u);
    }
  }
  const auto laplace = build_constraints(pts, 2, 4.0, ConstraintKind::Laplace);
  EXPECT_THROW(neumann_stencil(laplace, Method::Mps), std::invalid_argument);
}

TEST(Neumann, NoInwardPointIsInfeasible) {
  const std::vector<Point> pts{{0, 1, 0}, {0, -1, 0}, {-1, 0.5, 0}};
  const auto res = neumann_stencil(build_constraints(pts, 2, 4.0, ConstraintKind::NeumannNormal), Method::Mps);
  EXPECT_TRUE(std::holds_alternative<InfeasibilityReport>(res));
}

TEST(LocalFrame, Orthonormal) {
  Rng rng(8);
  for (int t = 0; t < 50; ++t) {
    const Point v{rng.normal(), rng.normal(), rng.normal()};
    const auto f = local_frame(v, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) EXPECT_NEAR(dot(f[i], f[j]), i == j ? 1.0 : 0.0, 1e-14);
    EXPECT_NEAR(dot(f[0], v), norm(v), 1e-12);
  }
  const auto f2 = local_frame({0, -2, 0}, 2);
  EXPECT_NEAR(f2[0][1], -1.0, 1e-15);
  EXPECT_NEAR(dot(f2[0], f2[1]), 0.0, 1e-15);
}
