#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace mpsfd {

/// min c^T s  subject to  A s = b, s >= 0.
struct StandardLp {
  Eigen::VectorXd cost;    // m
  Eigen::MatrixXd matrix;  // k x m
  Eigen::VectorXd rhs;     // k
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

const char* to_string(LpStatus status);

struct LpOutcome {
  LpStatus status = LpStatus::Infeasible;
  Eigen::VectorXd solution;          // Optimal only
  std::vector<std::size_t> basis;    // Optimal only, ascending column indices
  double objective = 0.0;
  Eigen::VectorXd certificate;       // Infeasible only: A^T w >= 0, b^T w < 0
  int pivots = 0;
};

struct SimplexOptions {
  double pivot_tolerance = 1e-11;
  double sign_tolerance = 1e-12;
  // Constraint residual tolerance is residual_scale * (1 + |b|_inf).
  double residual_scale = 1e-10;
  // Relative tolerance on reduced costs (scaled by max |c_j|).
  double optimality_tolerance = 1e-11;
  // Hard cap; zero selects 50 * (k + m).
  int max_pivots = 0;
};

/// Equality-residual tolerance used by solve_lp for this problem.
double residual_tolerance(const StandardLp& lp, const SimplexOptions& options = {});

/// Two-phase revised simplex with Bland's rule for entering and leaving
/// variables. Infeasible problems carry a Farkas certificate built from the
/// Phase-I duals.
///
/// Throws std::invalid_argument on dimension mismatch or non-finite input.
LpOutcome solve_lp(const StandardLp& lp, const SimplexOptions& options = {});

struct BasicSolution {
  std::vector<std::size_t> basis;
  Eigen::VectorXd solution;
  double objective = 0.0;
};

inline constexpr std::size_t kMaxEnumerationColumns = 14;

/// Brute force over all k-column subsets; returns every basic feasible
/// solution sorted by objective. Intended as a test oracle (m <= 14).
std::vector<BasicSolution> enumerate_basic_solutions(const StandardLp& lp, double feasibility_tolerance = 1e-9);

}  // namespace mpsfd
