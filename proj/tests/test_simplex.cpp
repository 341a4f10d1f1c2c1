#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "mpsfd/random.hpp"
#include "mpsfd/simplex.hpp"

using namespace mpsfd;

namespace {

StandardLp make(std::initializer_list<double> cost, Eigen::MatrixXd a, std::initializer_list<double> b) {
  StandardLp lp;
  lp.cost = Eigen::Map<const Eigen::VectorXd>(cost.begin(), static_cast<Eigen::Index>(cost.size()));
  lp.matrix = std::move(a);
  lp.rhs = Eigen::Map<const Eigen::VectorXd>(b.begin(), static_cast<Eigen::Index>(b.size()));
  return lp;
}

void expect_valid(const StandardLp& lp, const LpOutcome& out) {
  const double tol = residual_tolerance(lp);
  if (out.status == LpStatus::Optimal) {
    EXPECT_LE((lp.matrix * out.solution - lp.rhs).cwiseAbs().maxCoeff(), tol);
    EXPECT_GE(out.solution.minCoeff(), -1e-12);
    EXPECT_LE(out.basis.size(), static_cast<std::size_t>(lp.matrix.rows()));
    for (Eigen::Index j = 0; j < out.solution.size(); ++j)
      if (out.solution(j) != 0.0)
        EXPECT_NE(std::find(out.basis.begin(), out.basis.end(), static_cast<std::size_t>(j)), out.basis.end());
    EXPECT_NEAR(out.objective, lp.cost.dot(out.solution), 1e-9 * (1 + std::abs(out.objective)));
  } else if (out.status == LpStatus::Infeasible) {
    EXPECT_GE((lp.matrix.transpose() * out.certificate).minCoeff(), -tol);
    EXPECT_LT(lp.rhs.dot(out.certificate), -tol);
  }
}

}  // namespace

TEST(Simplex, PicksCheaperColumn) {
  Eigen::MatrixXd a(1, 2);
  a << 1, 1;
  const auto lp = make({1, 2}, a, {1});
  const auto out = solve_lp(lp);
  ASSERT_EQ(out.status, LpStatus::Optimal);
  EXPECT_NEAR(out.solution(0), 1.0, 1e-14);
  EXPECT_NEAR(out.solution(1), 0.0, 1e-14);
  EXPECT_NEAR(out.objective, 1.0, 1e-14);
  expect_valid(lp, out);
}

TEST(Simplex, SignObstructionCertificate) {
  Eigen::MatrixXd a(1, 2);
  a << 1, 1;
  const auto lp = make({3, 5}, a, {-1});
  const auto out = solve_lp(lp);
  ASSERT_EQ(out.status, LpStatus::Infeasible);
  ASSERT_EQ(out.certificate.size(), 1);
  EXPECT_GT(out.certificate(0), 0.0);
  expect_valid(lp, out);
}

TEST(Simplex, Unbounded) {
  Eigen::MatrixXd a(1, 2);
  a << 1, -1;
  const auto lp = make({0, -1}, a, {1});
  EXPECT_EQ(solve_lp(lp).status, LpStatus::Unbounded);
}

TEST(Simplex, CircleExampleObjectiveFour) {
  const double phis[6] = {0, 1, 2, 3, 0.1, 0.2};
  Eigen::MatrixXd a(5, 6);
  for (int i = 0; i < 6; ++i) {
    const double x = std::cos(std::numbers::pi / 2 * phis[i]), y = std::sin(std::numbers::pi / 2 * phis[i]);
    a.col(i) << x, y, x * y, x * x, y * y;
  }
  const auto lp = make({1, 1, 1, 1, 1, 1}, a, {0, 0, 0, 2, 2});
  const auto out = solve_lp(lp);
  ASSERT_EQ(out.status, LpStatus::Optimal);
  EXPECT_NEAR(out.objective, 4.0, 1e-9);
  EXPECT_LE((out.solution.array() > 1e-12).count(), 5);
  expect_valid(lp, out);
}

TEST(Simplex, RedundantRowsAreHandled) {
  Eigen::MatrixXd a(2, 3);
  a << 1, 1, 1, 2, 2, 2;
  const auto lp = make({1, 2, 3}, a, {1, 2});
  const auto out = solve_lp(lp);
  ASSERT_EQ(out.status, LpStatus::Optimal);
  EXPECT_NEAR(out.objective, 1.0, 1e-12);
  expect_valid(lp, out);
}

TEST(Simplex, RejectsBadInput) {
  StandardLp lp;
  lp.cost = Eigen::VectorXd::Ones(3);
  lp.matrix = Eigen::MatrixXd::Ones(2, 2);
  lp.rhs = Eigen::VectorXd::Ones(2);
  EXPECT_THROW(solve_lp(lp), std::invalid_argument);
  lp.matrix = Eigen::MatrixXd::Ones(2, 3);
  lp.matrix(0, 0) = std::nan("");
  EXPECT_THROW(solve_lp(lp), std::invalid_argument);
}

TEST(Enumeration, SmallExamples) {
  Eigen::MatrixXd a(1, 2);
  a << 1, 1;
  const auto all = enumerate_basic_solutions(make({1, 2}, a, {1}));
  ASSERT_EQ(all.size(), 2u);
  EXPECT_NEAR(all[0].objective, 1.0, 1e-15);
  EXPECT_NEAR(all[1].objective, 2.0, 1e-15);
  EXPECT_TRUE(enumerate_basic_solutions(make({1, 2}, a, {-1})).empty());
  StandardLp big;
  big.cost = Eigen::VectorXd::Ones(15);
  big.matrix = Eigen::MatrixXd::Ones(1, 15);
  big.rhs = Eigen::VectorXd::Ones(1);
  EXPECT_THROW(enumerate_basic_solutions(big), std::invalid_argument);
}

// Random problems with positive costs: the simplex optimum must equal the
// best vertex, and infeasibility must coincide with an empty vertex list.
TEST(Simplex, MatchesEnumerationOracle) {
  Rng rng(2024);
  int feasible = 0, infeasible = 0;
  for (int t = 0; t < 400; ++t) {
    const int k = 2 + static_cast<int>(rng.below(4));
    const int m = k + 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(12 - k)));
    StandardLp lp;
    lp.matrix.resize(k, m);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < m; ++j) lp.matrix(i, j) = rng.normal();
    lp.cost.resize(m);
    for (int j = 0; j < m; ++j) lp.cost(j) = rng.uniform(0.1, 2.0);
    lp.rhs.resize(k);
    for (int i = 0; i < k; ++i) lp.rhs(i) = rng.normal();
    const auto out = solve_lp(lp);
    const auto oracle = enumerate_basic_solutions(lp);
    expect_valid(lp, out);
    if (oracle.empty()) {
      EXPECT_EQ(out.status, LpStatus::Infeasible) << "trial " << t;
      ++infeasible;
    } else {
      ASSERT_EQ(out.status, LpStatus::Optimal) << "trial " << t;
      EXPECT_NEAR(out.objective, oracle.front().objective, 1e-8 * (1 + std::abs(oracle.front().objective)));
      ++feasible;
    }
  }
  EXPECT_GT(feasible, 50);
  EXPECT_GT(infeasible, 50);
}

TEST(Simplex, DegenerateProblemsTerminate) {
  // Many identical columns and a zero right-hand side invite cycling.
  Eigen::MatrixXd a(3, 9);
  a << 1, 1, 1, -1, -1, -1, 0, 0, 1, 0, 1, -1, 0, 1, -1, 1, -1, 0, 1, 0, 0, 1, 0, 0, 1, 1, 1;
  StandardLp lp;
  lp.matrix = a;
  lp.rhs = Eigen::VectorXd::Zero(3);
  lp.cost = -Eigen::VectorXd::Ones(9);
  lp.cost(8) = 1.0;
  const auto out = solve_lp(lp);
  EXPECT_NE(out.status, LpStatus::Infeasible);
  EXPECT_LT(out.pivots, 50 * 12);
}
