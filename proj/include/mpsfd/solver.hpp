#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "mpsfd/common.hpp"
#include "mpsfd/sparse.hpp"

namespace mpsfd {

enum class SolverMethod { Jacobi, GaussSeidel, BiCGStab };

const char* to_string(SolverMethod method);
/// Accepts "jacobi", "gs" and "bicgstab".
SolverMethod parse_solver(const std::string& name);

/// y = A x. Rows are summed in ascending column order; with threads > 1 the
/// rows are split into contiguous blocks, so the result is unchanged.
std::vector<double> matvec(const SparseMatrix& a, const std::vector<double>& x, int threads = 1);
void matvec(const SparseMatrix& a, const std::vector<double>& x, std::vector<double>& y, int threads = 1);

struct SolverOptions {
  SolverMethod method = SolverMethod::BiCGStab;
  double tol = 1e-10;
  // Zero selects 100 * n.
  std::size_t max_iter = 0;
  int threads = 1;
  // Diagonal (Jacobi) preconditioning for BiCGStab.
  bool precondition = true;
};

struct SolveReport {
  SolverMethod method = SolverMethod::BiCGStab;
  std::size_t iterations = 0;
  double relative_residual = 0.0;
  // history[0] belongs to x0, history[k] to iteration k.
  std::vector<double> history;
  double seconds = 0.0;
  bool converged = false;
};

struct SolveResult {
  std::vector<double> solution;
  SolveReport report;
};

class BreakdownError : public NumericalError {
 public:
  BreakdownError(std::size_t iteration, const std::string& what);
  std::size_t iteration() const { return iteration_; }

 private:
  std::size_t iteration_;
};

/// Stops when |rhs - A x|_2 / |rhs|_2 <= tol or after max_iter iterations.
/// Throws std::invalid_argument on a zero diagonal (Jacobi, Gauss-Seidel) or
/// size mismatch, and BreakdownError when a BiCGStab scalar drops below
/// 1e-30 in magnitude.
SolveResult solve_iterative(const SparseMatrix& a, const std::vector<double>& rhs, const SolverOptions& options,
                            std::vector<double> x0 = {});

/// Dense LU solve; meant as a test oracle for small systems.
std::vector<double> dense_solve(const SparseMatrix& a, const std::vector<double>& rhs);

/// One value per line, 17 significant digits.
void write_vector(std::ostream& out, const std::vector<double>& v);
std::vector<double> read_vector(std::istream& in);

}  // namespace mpsfd
