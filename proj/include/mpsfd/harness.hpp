#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mpsfd/assembly.hpp"
#include "mpsfd/cloud.hpp"
#include "mpsfd/geometry.hpp"
#include "mpsfd/solver.hpp"

namespace mpsfd {

enum class BcMode { AllDirichlet, MixedNeumannBottom };

/// "dirichlet" or "mixed".
const char* to_string(BcMode bc);
BcMode parse_bc(const std::string& name);

/// Range max g - min g of the unnormalized field over grid nodes (n per axis)
/// of the domain closure.
double sampled_range(int dim, const Domain& domain, int nodes_per_axis);

/// g = (x sin(y+2) + y sin(2x+1)) / c2 in 2d and
/// g = (x sin(y+2) + y sin(2z+3) + z sin(3x+1)) / c3 in 3d, with c_d chosen
/// so that max g - min g = 1 over the default domain.
class ManufacturedSolution {
 public:
  ManufacturedSolution(int dim, BcMode bc, double normalization);

  /// Normalization sampled on 400^2 (2d) or 100^3 (3d) nodes of the
  /// default domain; cached.
  static ManufacturedSolution standard(int dim, BcMode bc);
  static double standard_normalization(int dim);

  int dim() const { return dim_; }
  BcMode bc() const { return bc_; }
  double normalization() const { return c_; }

  double value(const Point& x) const;
  double laplacian(const Point& x) const;
  /// f = -lap g, so -lap u = f is solved by u = g.
  double source(const Point& x) const { return -laplacian(x); }
  Point gradient(const Point& x) const;

  BoundaryData boundary_data() const;

 private:
  int dim_;
  BcMode bc_;
  double c_;
};

/// Turns boundary points on the face x_d = lo_d into Neumann points, except
/// those on edges or corners of that face. AllDirichlet returns the cloud
/// unchanged.
PointCloud apply_bc(const PointCloud& cloud, const Domain& domain, BcMode bc);

std::vector<double> default_h_sequence(int dim);

struct ConvergenceConfig {
  int dim = 2;
  std::vector<double> hs;  // empty selects default_h_sequence(dim)
  int seeds = 5;
  std::uint64_t base_seed = 1;
  std::vector<Method> methods{Method::Mps, Method::Lsq};
  std::vector<BcMode> bcs{BcMode::AllDirichlet};
  double alpha = kDefaultAlpha;
  double radius_factor = kDefaultRadiusSafety;
  // delta_min = delta_ratio * h
  double delta_ratio = 0.25;
  SolverOptions solver{SolverMethod::BiCGStab, 1e-10, 0, 1, true};
  int assembly_threads = 1;
};

struct ConvergenceRecord {
  double h = 0.0;
  std::uint64_t seed = 0;
  Method method = Method::Mps;
  BcMode bc = BcMode::AllDirichlet;
  double err_max = 0.0;
  double setup_s = 0.0;
  double solve_s = 0.0;
  std::size_t nnz = 0;
  std::size_t n = 0;
  bool converged = false;
};

/// Errors are measured at interior points only. Records come sorted by
/// (h, seed, method, bc). Failures propagate as Error with h and
/// seed prepended to the message.
std::vector<ConvergenceRecord> run_convergence(const ConvergenceConfig& config);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::vector<double> hs;
  std::vector<double> mean_errors;
};

/// Least squares on (log h, log mean error) over the per-h means.
SlopeFit fit_slope(const std::vector<ConvergenceRecord>& records, Method method, BcMode bc);

/// Largest over h of max(a/b, b/a) for the per-h mean errors of two methods.
double error_constant_ratio(const std::vector<ConvergenceRecord>& records, BcMode bc);

void write_convergence_csv(std::ostream& out, const std::vector<ConvergenceRecord>& records);

struct CostConfig {
  int dim = 2;
  std::vector<double> hs{0.05, 0.025, 0.0125};
  std::uint64_t seed = 1;
  double alpha = kDefaultAlpha;
  double radius_factor = kDefaultRadiusSafety;
  double delta_ratio = 0.25;
  int sweeps = 20;
  int repeats = 5;
};

struct CostRecord {
  double h = 0.0;
  std::size_t n = 0;
  Method method = Method::Mps;
  double setup_s = 0.0;
  // Gauss-Seidel seconds per sweep, best of the repeats.
  double solve_s = 0.0;
  std::size_t nnz = 0;
  std::size_t interior_rows = 0;
  std::size_t max_interior_row_nnz = 0;
  double mean_candidates = 0.0;
};

struct CostRatio {
  double h = 0.0;
  std::size_t n = 0;
  double nnz_ratio = 0.0;    // MPS / LSQ
  double setup_ratio = 0.0;  // MPS / LSQ
  double solve_ratio = 0.0;  // MPS / LSQ
};

std::vector<CostRecord> run_cost_comparison(const CostConfig& config);
std::vector<CostRatio> cost_ratios(const std::vector<CostRecord>& records);
void write_cost_csv(std::ostream& out, const std::vector<CostRecord>& records);

/// Maximum |u_i - g(x_i)| over interior points.
double interior_max_error(const PointCloud& cloud, const std::vector<double>& u, const ManufacturedSolution& g);

}  // namespace mpsfd
