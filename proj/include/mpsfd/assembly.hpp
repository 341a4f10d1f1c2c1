#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "mpsfd/cloud.hpp"
#include "mpsfd/geometry.hpp"
#include "mpsfd/sparse.hpp"
#include "mpsfd/stencil.hpp"

namespace mpsfd {

struct AssemblyOptions {
  Method method = Method::Mps;
  double alpha = kDefaultAlpha;
  // Mesh size used for the candidate radius; must be positive.
  double mesh_size = 0.0;
  double radius_factor = kDefaultRadiusSafety;
  int visibility_samples = 16;
  int threads = 1;
  SimplexOptions simplex;
};

/// Problem data for -lap u = f with u = g on Dirichlet points and
/// du/dn = flux(x, n) on Neumann points (n the outward unit normal).
struct BoundaryData {
  std::function<double(const Point&)> source;
  std::function<double(const Point&)> dirichlet;
  std::function<double(const Point&, const Point&)> flux;
};

/// Evaluates the right-hand side for a cloud once boundary data is known.
class RhsAssembler {
 public:
  RhsAssembler() = default;
  explicit RhsAssembler(const PointCloud& cloud);
  std::vector<double> operator()(const BoundaryData& data) const;

 private:
  std::vector<Point> points_;
  std::vector<Role> roles_;
  std::vector<Point> normals_;
};

/// One point's stencil problem, kept for inspection (stencil-debug).
struct PointStencil {
  std::size_t center = 0;
  std::vector<std::size_t> candidates;  // cloud indices
  ConstraintSystem constraints;         // offsets in the local frame for Neumann points
  StencilResult result;
};

PointStencil build_point_stencil(const PointCloud& cloud, const Domain& domain, std::size_t center,
                                 const AssemblyOptions& options);

struct AssembledSystem {
  SparseMatrix matrix;
  RhsAssembler rhs;
  // Dirichlet points no interior or Neumann row refers to.
  std::vector<std::size_t> unused_dirichlet;
  double candidate_radius = 0.0;
  std::size_t candidate_total = 0;  // summed over non-Dirichlet rows
  double setup_seconds = 0.0;
};

class InfeasibleStencilError : public NumericalError {
 public:
  InfeasibleStencilError(std::size_t point, const Point& x, InfeasibilityReport report);
  std::size_t point() const { return point_; }
  const InfeasibilityReport& report() const { return report_; }

 private:
  std::size_t point_;
  InfeasibilityReport report_;
};

/// Interior rows discretize -lap (diagonal -s0, off-diagonals -s_i);
/// Dirichlet rows are identity rows; Neumann rows are the outward normal
/// derivative (diagonal sum s_i, off-diagonals -s_i of the inward stencil).
///
/// Throws InfeasibleStencilError when an MPS program has no solution and
/// NumericalError when an LSQ system is rank deficient. Output does not
/// depend on options.threads.
AssembledSystem assemble(const PointCloud& cloud, const Domain& domain, const AssemblyOptions& options);

struct MatrixReport {
  bool is_l_matrix = false;
  bool weakly_dominant = false;
  std::vector<std::size_t> unreachable;
  std::size_t nnz = 0;
  std::size_t min_row_nnz = 0;
  std::size_t max_row_nnz = 0;
  double mean_row_nnz = 0.0;
  std::size_t max_interior_row_nnz = 0;
  // max over interior rows of |row sum| / |diagonal|
  double max_interior_row_sum = 0.0;
};

MatrixReport analyze(const SparseMatrix& matrix, double dominance_tolerance = 1e-9);

using LinearSolve = std::function<std::vector<double>(const SparseMatrix&, const std::vector<double>&)>;

struct MaxPrincipleResult {
  bool passed = false;
  // max over trials of max_i x_i / |rhs|_inf
  double worst_ratio = 0.0;
};

/// Draws every rhs entry from U[-1, 0] and checks x <= tol * |rhs|_inf.
MaxPrincipleResult discrete_max_principle_test(const SparseMatrix& matrix, const LinearSolve& solve, int trials,
                                               std::uint64_t seed, double tolerance = 1e-8);

}  // namespace mpsfd
