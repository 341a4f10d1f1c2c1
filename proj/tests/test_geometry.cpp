#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "mpsfd/geometry.hpp"
#include "mpsfd/random.hpp"
#include "mpsfd/stencil.hpp"

using namespace mpsfd;

namespace {

std::vector<Point> ring(int count, double start_deg, double step_deg, double r = 1.0) {
  std::vector<Point> out;
  for (int i = 0; i < count; ++i) {
    const double a = (start_deg + i * step_deg) * std::numbers::pi / 180.0;
    out.push_back({r * std::cos(a), r * std::sin(a), 0.0});
  }
  return out;
}

Point rotate2(const Point& x, double a) {
  return {std::cos(a) * x[0] - std::sin(a) * x[1], std::sin(a) * x[0] + std::cos(a) * x[1], 0.0};
}

}  // namespace

TEST(Phi, CutSquareValues) {
  const auto d = Domain::unit_box_with_cut(2);
  // Frozen from tests/oracles/compute_oracles.py.
  EXPECT_NEAR(d.phi({0.5, 0.1, 0}), -0.1, 1e-15);
  EXPECT_NEAR(d.phi({0.5, 0.9, 0}), 0.24, 1e-15);
  EXPECT_DOUBLE_EQ(d.phi({0, 0, 0}), 0.0);
  EXPECT_DOUBLE_EQ(phi(d, {1, 1, 0}), 0.0);
}

TEST(Phi, ThreeDimensionalCut) {
  const auto d = Domain::unit_box_with_cut(3);
  EXPECT_NEAR(d.phi({0.5, 0.5, 0.1}), -0.1, 1e-15);
  EXPECT_NEAR(d.phi({0.5, 0.5, 0.9}), 0.24, 1e-15);
  EXPECT_GT(d.phi({0.5, 0.5, 1.0}), 0.0);
}

TEST(Phi, LipschitzOnRandomPairs) {
  for (int dim : {2, 3}) {
    const auto d = Domain::unit_box_with_cut(dim);
    Rng rng(7 + dim);
    for (int t = 0; t < 2000; ++t) {
      Point x{0, 0, 0}, y{0, 0, 0};
      for (int a = 0; a < dim; ++a) {
        x[a] = rng.uniform(-0.3, 1.3);
        y[a] = rng.uniform(-0.3, 1.3);
      }
      EXPECT_LE(std::abs(d.phi(x) - d.phi(y)), distance(x, y) + 1e-14);
    }
  }
}

TEST(Domain, RejectsInteriorBall) {
  EXPECT_THROW(Domain(2, {0, 0, 0}, {1, 1, 1}, Ball{{0.5, 0.5, 0}, 0.2}), std::invalid_argument);
  EXPECT_NO_THROW(Domain(2, {0, 0, 0}, {1, 1, 1}, Ball{{3, 3, 0}, 0.2}));
  EXPECT_THROW(Domain(4, {0, 0, 0}, {1, 1, 1}), std::invalid_argument);
}

TEST(Domain, OutwardNormals) {
  const auto d = Domain::unit_box_with_cut(2);
  const auto bottom = d.outward_normal({0.3, 0.0, 0});
  EXPECT_EQ(bottom, (Point{0, -1, 0}));
  const auto arc = d.outward_normal({0.5, 0.66, 0});
  EXPECT_NEAR(arc[1], 1.0, 1e-12);
}

TEST(HalfSpace, TwoDimensionalExamples) {
  const std::vector<Point> cross4{{1, 0, 0}, {0, 1, 0}, {-1, 0, 0}, {0, -1, 0}};
  EXPECT_TRUE(half_space_check(cross4, 2));
  const std::vector<Point> quarter{{1, 0, 0}, {0, 1, 0}, {1, 1, 0}};
  EXPECT_FALSE(half_space_check(quarter, 2));
  const std::vector<Point> tri{{1, 0, 0}, {-1, 1, 0}, {-1, -1, 0}};
  EXPECT_TRUE(half_space_check(tri, 2));
  // Two opposite points lie in a closed half plane.
  const std::vector<Point> line{{1, 0, 0}, {-1, 0, 0}};
  EXPECT_FALSE(half_space_check(line, 2));
  EXPECT_THROW(half_space_check(std::vector<Point>{}, 2), std::invalid_argument);
}

TEST(HalfSpace, ThreeDimensionalExamples) {
  const std::vector<Point> octahedron{{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  EXPECT_TRUE(half_space_check(octahedron, 3));
  auto upper = octahedron;
  upper.pop_back();
  EXPECT_FALSE(half_space_check(upper, 3));
  const std::vector<Point> tetra{{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}};
  EXPECT_TRUE(half_space_check(tetra, 3));
}

TEST(HalfSpace, PermutationAndRotationInvariance) {
  Rng rng(11);
  for (int t = 0; t < 300; ++t) {
    std::vector<Point> pts;
    const int m = 3 + static_cast<int>(rng.below(6));
    for (int i = 0; i < m; ++i) pts.push_back({rng.normal(), rng.normal(), 0.0});
    const bool base = half_space_check(pts, 2);
    auto perm = pts;
    std::reverse(perm.begin(), perm.end());
    EXPECT_EQ(half_space_check(perm, 2), base);
    const double a = rng.uniform(0, 2 * std::numbers::pi);
    std::vector<Point> rot;
    for (const auto& p : pts) rot.push_back(rotate2(p, a));
    EXPECT_EQ(half_space_check(rot, 2), base);
  }
}

TEST(HalfSpace, ThreeDimensionalRotationInvariance) {
  Rng rng(12);
  for (int t = 0; t < 100; ++t) {
    std::vector<Point> pts;
    const int m = 4 + static_cast<int>(rng.below(6));
    for (int i = 0; i < m; ++i) pts.push_back({rng.normal(), rng.normal(), rng.normal()});
    const bool base = half_space_check(pts, 3);
    const auto frame = local_frame({rng.normal(), rng.normal(), rng.normal()}, 3);
    std::vector<Point> rot;
    for (const auto& p : pts) rot.push_back({dot(frame[0], p), dot(frame[1], p), dot(frame[2], p)});
    EXPECT_EQ(half_space_check(rot, 3), base);
    std::reverse(rot.begin(), rot.end());
    EXPECT_EQ(half_space_check(rot, 3), base);
  }
}

TEST(ConeParams, Constants) {
  const auto p2 = ConeCriterionParams::for_dimension(2);
  EXPECT_NEAR(p2.beta, std::sqrt(2.0) - 1.0, 1e-16);
  EXPECT_NEAR(p2.gamma, std::numbers::pi / 4.0, 1e-15);
  const auto p3 = ConeCriterionParams::for_dimension(3);
  EXPECT_NEAR(p3.gamma * 180.0 / std::numbers::pi, 33.7, 0.05);
  EXPECT_GT(p3.direction_margin, 0.0);
}

TEST(ConeCriterion, TwoDimensionalExamples) {
  const auto p = ConeCriterionParams::for_dimension(2);
  EXPECT_TRUE(cone_criterion_check(ring(8, 0, 45), p));
  EXPECT_FALSE(cone_criterion_check(ring(4, 0, 90), p));
  EXPECT_TRUE(cone_criterion_check(ring(9, 0, 40), p));
  EXPECT_FALSE(cone_criterion_check(ring(7, 0, 50), p));
  // The axis cross fails the criterion, yet the five-point stencil is positive.
  const auto cs = build_constraints(ring(4, 0, 90), 2, 4.0, ConstraintKind::Laplace);
  EXPECT_TRUE(std::holds_alternative<Stencil>(mps_stencil(cs)));
}

TEST(ConeCriterion, ThreeDimensionalDenseSphere) {
  const auto p = ConeCriterionParams::for_dimension(3);
  EXPECT_TRUE(cone_criterion_check(fibonacci_directions(2000), p));
  const std::vector<Point> octahedron{{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  EXPECT_FALSE(cone_criterion_check(octahedron, p));
}

TEST(ConeCriterion, ImpliesHalfSpace) {
  const auto p2 = ConeCriterionParams::for_dimension(2);
  Rng rng(3);
  int passed = 0;
  for (int t = 0; t < 2000; ++t) {
    std::vector<Point> pts;
    const int m = 10 + static_cast<int>(rng.below(20));
    for (int i = 0; i < m; ++i) pts.push_back({rng.normal(), rng.normal(), 0.0});
    if (!cone_criterion_check(pts, p2)) continue;
    ++passed;
    EXPECT_TRUE(half_space_check(pts, 2));
  }
  EXPECT_GT(passed, 20);

  const auto p3 = ConeCriterionParams::for_dimension(3);
  int passed3 = 0;
  for (int t = 0; t < 30; ++t) {
    std::vector<Point> pts;
    for (int i = 0; i < 1500; ++i) pts.push_back({rng.normal(), rng.normal(), rng.normal()});
    if (!cone_criterion_check(pts, p3)) continue;
    ++passed3;
    EXPECT_TRUE(half_space_check(pts, 3));
  }
  EXPECT_GT(passed3, 0);
}

TEST(CandidateRadius, Ratios) {
  const auto p2 = ConeCriterionParams::for_dimension(2);
  const auto p3 = ConeCriterionParams::for_dimension(3);
  EXPECT_NEAR(candidate_radius(0.2, p2, 1.0), 0.1 * std::sqrt(4 + 2 * std::sqrt(2.0)), 1e-14);
  EXPECT_NEAR(candidate_radius(0.2, p3, 1.0), 0.1 * std::sqrt(7 + 2 * std::sqrt(6.0)), 1e-14);
  EXPECT_NEAR(candidate_radius(0.2, p2, 1.0), 0.261, 1e-3);
  EXPECT_NEAR(candidate_radius(0.2, p3, 1.0), 0.345, 1e-3);
  EXPECT_NEAR(candidate_radius(0.2, p2), 1.05 * candidate_radius(0.2, p2, 1.0), 1e-15);
  EXPECT_THROW(candidate_radius(0.0, p2), std::invalid_argument);
  EXPECT_NEAR(guaranteed_cone_radius(0.2, p2), 0.1 * (1 + std::sqrt(4 + 2 * std::sqrt(2.0))), 1e-14);
}

TEST(Visibility, Examples) {
  const auto box = Domain::unit_box(2);
  EXPECT_TRUE(visible_from(box, {0.1, 0.1, 0}, {0.9, 0.95, 0}));
  const auto cut = Domain::unit_box_with_cut(2);
  // Both ends below the arc near the top edge, the midpoint inside the ball.
  const Point a{0.02, 0.95, 0}, b{0.98, 0.95, 0};
  EXPECT_LT(cut.phi(a), 0.0);
  EXPECT_LT(cut.phi(b), 0.0);
  EXPECT_GT(cut.phi(0.5 * (a + b)), 0.0);
  EXPECT_FALSE(visible_from(cut, a, b));
  EXPECT_TRUE(visible_from(cut, a, a));
}

TEST(FibonacciDirections, UnitVectors) {
  for (const auto& v : fibonacci_directions(100)) EXPECT_NEAR(norm(v), 1.0, 1e-14);
}
