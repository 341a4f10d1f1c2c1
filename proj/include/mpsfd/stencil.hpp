#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "mpsfd/common.hpp"
#include "mpsfd/simplex.hpp"

namespace mpsfd {

enum class ConstraintKind { Laplace, NeumannNormal };

/// Number of consistency constraints: d(d+3)/2 for the Laplacian, d for a
/// normal derivative.
int constraint_count(int dim, ConstraintKind kind);

/// Consistency constraints V s = b for one approximation point.
///
/// Laplace row order: 2d (x, y, xy, x^2, y^2), b = (0, 0, 0, 2, 2);
/// 3d (x, y, z, xy, xz, yz, x^2, y^2, z^2), b = (0, ..., 0, 2, 2, 2).
/// NeumannNormal rows are the coordinates and b is the unit vector of
/// normal_axis. Weights are |offset|^-alpha.
struct ConstraintSystem {
  int dim = 2;
  ConstraintKind kind = ConstraintKind::Laplace;
  int normal_axis = 0;
  double alpha = 4.0;
  Eigen::MatrixXd vandermonde;
  Eigen::VectorXd rhs;
  std::vector<Point> offsets;
  Eigen::VectorXd weights;

  std::size_t rows() const { return static_cast<std::size_t>(vandermonde.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(vandermonde.cols()); }
};

inline constexpr double kDefaultAlpha = 4.0;

/// Throws std::invalid_argument for alpha <= 2, an empty offset list, or a
/// (near) coincident point.
ConstraintSystem build_constraints(std::span<const Point> offsets, int dim, double alpha, ConstraintKind kind,
                                   int normal_axis = 0);

struct Stencil {
  Method method = Method::Mps;
  std::size_t center = 0;
  // Positions in the candidate list the stencil was built from.
  std::vector<std::size_t> neighbors;
  std::vector<double> coefficients;
  double center_coefficient = 0.0;
  bool positive = false;
  int pivots = 0;
  double objective = 0.0;  // MPS: sum s_i |x_i|^alpha
};

/// Farkas certificate w for V s = b, s >= 0: V^T w >= 0 and b^T w < 0.
struct InfeasibilityReport {
  Eigen::VectorXd certificate;
  double min_dual_slack = 0.0;  // min_i (V^T w)_i
  double gap = 0.0;             // b^T w
  int pivots = 0;
};

using StencilResult = std::variant<Stencil, InfeasibilityReport>;

class RankDeficientError : public NumericalError {
 public:
  RankDeficientError(std::size_t constraints, std::size_t rank, std::size_t candidates);
  std::size_t constraints() const { return constraints_; }
  std::size_t rank() const { return rank_; }

 private:
  std::size_t constraints_;
  std::size_t rank_;
};

/// Weighted least squares s = W V^T (V W V^T)^-1 b.
Stencil lsq_stencil(const ConstraintSystem& cs);

/// Minimal positive stencil: min sum s_i / w_i  s.t.  V s = b, s >= 0.
/// Only strictly positive entries of the basic solution are kept.
StencilResult mps_stencil(const ConstraintSystem& cs, const SimplexOptions& options = {});

/// Normal-derivative stencil along the first local axis (kind must be
/// NeumannNormal). First order accurate.
StencilResult neumann_stencil(const ConstraintSystem& cs, Method method);

/// Largest absolute residual over all consistency constraints, including
/// sum_{i>=0} s_i = 0. offsets[i] belongs to stencil.coefficients[i].
double verify_consistency(const Stencil& stencil, std::span<const Point> offsets, int dim, ConstraintKind kind,
                          int normal_axis = 0);

/// Offsets of the stencil's neighbors, aligned with its coefficients.
std::vector<Point> stencil_offsets(const Stencil& stencil, const ConstraintSystem& cs);

/// Orthonormal frame whose first axis is `first`; the remaining axes
/// complete it from the coordinate axis least aligned with `first`. Rows
/// of the result are the frame axes.
std::array<Point, 3> local_frame(const Point& first, int dim);

}  // namespace mpsfd
