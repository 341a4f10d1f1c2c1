#include "mpsfd/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <tuple>

namespace mpsfd {

const char* to_string(BcMode bc) { return bc == BcMode::AllDirichlet ? "dirichlet" : "mixed"; }

BcMode parse_bc(const std::string& name) {
  if (name == "dirichlet") return BcMode::AllDirichlet;
  if (name == "mixed") return BcMode::MixedNeumannBottom;
  throw std::invalid_argument("unknown boundary mode '" + name + "'");
}

namespace {

double raw_value(int dim, const Point& x) {
  if (dim == 2) return x[0] * std::sin(x[1] + 2.0) + x[1] * std::sin(2.0 * x[0] + 1.0);
  return x[0] * std::sin(x[1] + 2.0) + x[1] * std::sin(2.0 * x[2] + 3.0) + x[2] * std::sin(3.0 * x[0] + 1.0);
}

}  // namespace

double sampled_range(int dim, const Domain& domain, int nodes_per_axis) {
  require(nodes_per_axis >= 2, "need at least two nodes per axis");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  const int nz = dim == 3 ? nodes_per_axis : 1;
  const double step = 1.0 / (nodes_per_axis - 1);
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < nodes_per_axis; ++j)
      for (int i = 0; i < nodes_per_axis; ++i) {
        Point x{0, 0, 0};
        const int idx[3] = {i, j, k};
        for (int a = 0; a < dim; ++a) x[a] = domain.lo()[a] + idx[a] * step * (domain.hi()[a] - domain.lo()[a]);
        if (domain.phi(x) > 0.0) continue;
        const double g = raw_value(dim, x);
        lo = std::min(lo, g);
        hi = std::max(hi, g);
      }
  return hi - lo;
}

ManufacturedSolution::ManufacturedSolution(int dim, BcMode bc, double normalization)
    : dim_(dim), bc_(bc), c_(normalization) {
  require_dimension(dim);
  require(normalization > 0.0, "normalization must be positive");
}

double ManufacturedSolution::standard_normalization(int dim) {
  require_dimension(dim);
  static std::mutex mutex;
  static std::map<int, double> cache;
  std::lock_guard lock(mutex);
  if (auto it = cache.find(dim); it != cache.end()) return it->second;
  const double c = sampled_range(dim, Domain::unit_box_with_cut(dim), dim == 2 ? 400 : 100);
  cache.emplace(dim, c);
  return c;
}

ManufacturedSolution ManufacturedSolution::standard(int dim, BcMode bc) {
  return ManufacturedSolution(dim, bc, standard_normalization(dim));
}

double ManufacturedSolution::value(const Point& x) const { return raw_value(dim_, x) / c_; }

double ManufacturedSolution::laplacian(const Point& x) const {
  if (dim_ == 2) return (-x[0] * std::sin(x[1] + 2.0) - 4.0 * x[1] * std::sin(2.0 * x[0] + 1.0)) / c_;
  return (-x[0] * std::sin(x[1] + 2.0) - 4.0 * x[1] * std::sin(2.0 * x[2] + 3.0) -
          9.0 * x[2] * std::sin(3.0 * x[0] + 1.0)) /
         c_;
}

Point ManufacturedSolution::gradient(const Point& x) const {
  if (dim_ == 2)
    return {(std::sin(x[1] + 2.0) + 2.0 * x[1] * std::cos(2.0 * x[0] + 1.0)) / c_,
            (x[0] * std::cos(x[1] + 2.0) + std::sin(2.0 * x[0] + 1.0)) / c_, 0.0};
  return {(std::sin(x[1] + 2.0) + 3.0 * x[2] * std::cos(3.0 * x[0] + 1.0)) / c_,
          (x[0] * std::cos(x[1] + 2.0) + std::sin(2.0 * x[2] + 3.0)) / c_,
          (2.0 * x[1] * std::cos(2.0 * x[2] + 3.0) + std::sin(3.0 * x[0] + 1.0)) / c_};
}

BoundaryData ManufacturedSolution::boundary_data() const {
  BoundaryData data;
  data.source = [*this](const Point& x) { return source(x); };
  data.dirichlet = [*this](const Point& x) { return value(x); };
  data.flux = [*this](const Point& x, const Point& n) { return dot(gradient(x), n); };
  return data;
}

PointCloud apply_bc(const PointCloud& cloud, const Domain& domain, BcMode bc) {
  if (bc == BcMode::AllDirichlet) return cloud;
  const int dim = domain.dim();
  const int axis = dim - 1;
  return cloud.with_neumann(domain, [&](const Point& x) {
    if (std::abs(x[axis] - domain.lo()[axis]) > kBoundaryTolerance) return false;
    for (int a = 0; a < axis; ++a)
      if (x[a] <= domain.lo()[a] + kBoundaryTolerance || x[a] >= domain.hi()[a] - kBoundaryTolerance) return false;
    return true;
  });
}

std::vector<double> default_h_sequence(int dim) {
  require_dimension(dim);
  if (dim == 2) return {0.2, 0.141, 0.1, 0.0707, 0.05};
  return {0.25, 0.177, 0.125};
}

double interior_max_error(const PointCloud& cloud, const std::vector<double>& u, const ManufacturedSolution& g) {
  require(u.size() == cloud.size(), "solution size mismatch");
  double err = 0.0;
  for (std::size_t i = 0; i < cloud.size(); ++i)
    if (cloud.role(i) == Role::Interior) err = std::max(err, std::abs(u[i] - g.value(cloud.point(i))));
  return err;
}

std::vector<ConvergenceRecord> run_convergence(const ConvergenceConfig& config) {
  require_dimension(config.dim);
  require(config.seeds >= 1, "need at least one seed");
  const auto hs = config.hs.empty() ? default_h_sequence(config.dim) : config.hs;
  const Domain domain = Domain::unit_box_with_cut(config.dim);

  std::vector<ConvergenceRecord> records;
  for (double h : hs) {
    for (int s = 0; s < config.seeds; ++s) {
      const std::uint64_t seed = config.base_seed + static_cast<std::uint64_t>(s);
      char where[96];
      std::snprintf(where, sizeof where, "h=%g seed=%llu: ", h, static_cast<unsigned long long>(seed));
      try {
        const PointCloud base = generate(domain, h, config.delta_ratio * h, seed);
        for (BcMode bc : config.bcs) {
          const PointCloud cloud = apply_bc(base, domain, bc);
          const auto g = ManufacturedSolution::standard(config.dim, bc);
          for (Method method : config.methods) {
            AssemblyOptions opt;
            opt.method = method;
            opt.alpha = config.alpha;
            opt.mesh_size = h;
            opt.radius_factor = config.radius_factor;
            opt.threads = config.assembly_threads;
            const auto sys = assemble(cloud, domain, opt);
            const auto rhs = sys.rhs(g.boundary_data());
            const auto sol = solve_iterative(sys.matrix, rhs, config.solver);

            ConvergenceRecord rec;
            rec.h = h;
            rec.seed = seed;
            rec.method = method;
            rec.bc = bc;
            rec.err_max = interior_max_error(cloud, sol.solution, g);
            rec.setup_s = sys.setup_seconds;
            rec.solve_s = sol.report.seconds;
            rec.nnz = sys.matrix.nnz();
            rec.n = cloud.size();
            rec.converged = sol.report.converged;
            records.push_back(rec);
          }
        }
      } catch (const NumericalError& e) {
        throw NumericalError(where + std::string(e.what()));
      } catch (const Error& e) {
        throw Error(where + std::string(e.what()));
      }
    }
  }
  std::stable_sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
    return std::make_tuple(a.h, a.seed, a.method, a.bc) < std::make_tuple(b.h, b.seed, b.method, b.bc);
  });
  return records;
}

namespace {

std::map<double, double> mean_errors(const std::vector<ConvergenceRecord>& records, Method method, BcMode bc) {
  std::map<double, std::pair<double, int>> acc;
  for (const auto& r : records) {
    if (r.method != method || r.bc != bc) continue;
    auto& [sum, count] = acc[r.h];
    sum += r.err_max;
    ++count;
  }
  std::map<double, double> out;
  for (const auto& [h, sc] : acc) out[h] = sc.first / sc.second;
  return out;
}

}  // namespace

SlopeFit fit_slope(const std::vector<ConvergenceRecord>& records, Method method, BcMode bc) {
  SlopeFit fit;
  for (const auto& [h, e] : mean_errors(records, method, bc)) {
    fit.hs.push_back(h);
    fit.mean_errors.push_back(e);
  }
  const std::size_t n = fit.hs.size();
  require(n >= 2, "slope fit needs at least two mesh sizes");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::log(fit.hs[i]);
    const double y = std::log(fit.mean_errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double nn = static_cast<double>(n);
  fit.slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / nn;
  return fit;
}

double error_constant_ratio(const std::vector<ConvergenceRecord>& records, BcMode bc) {
  const auto mps = mean_errors(records, Method::Mps, bc);
  const auto lsq = mean_errors(records, Method::Lsq, bc);
  double worst = 0.0;
  for (const auto& [h, e] : mps) {
    auto it = lsq.find(h);
    if (it == lsq.end()) continue;
    worst = std::max({worst, e / it->second, it->second / e});
  }
  return worst;
}

void write_convergence_csv(std::ostream& out, const std::vector<ConvergenceRecord>& records) {
  out << "h,seed,method,bc,err_max,setup_s,solve_s,nnz\n";
  char buf[256];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof buf, "%.17g,%llu,%s,%s,%.17g,%.17g,%.17g,%zu\n", r.h,
                  static_cast<unsigned long long>(r.seed), to_string(r.method), to_string(r.bc), r.err_max, r.setup_s,
                  r.solve_s, r.nnz);
    out << buf;
  }
}

std::vector<CostRecord> run_cost_comparison(const CostConfig& config) {
  require_dimension(config.dim);
  require(config.sweeps >= 1 && config.repeats >= 1, "sweeps and repeats must be positive");
  const Domain domain = Domain::unit_box_with_cut(config.dim);
  const auto g = ManufacturedSolution::standard(config.dim, BcMode::AllDirichlet);
  std::vector<CostRecord> records;
  for (double h : config.hs) {
    const PointCloud cloud = generate(domain, h, config.delta_ratio * h, config.seed);
    for (Method method : {Method::Mps, Method::Lsq}) {
      AssemblyOptions opt;
      opt.method = method;
      opt.alpha = config.alpha;
      opt.mesh_size = h;
      opt.radius_factor = config.radius_factor;
      const auto sys = assemble(cloud, domain, opt);
      const auto rhs = sys.rhs(g.boundary_data());

      SolverOptions so;
      so.method = SolverMethod::GaussSeidel;
      so.tol = std::numeric_limits<double>::min();
      so.max_iter = static_cast<std::size_t>(config.sweeps);
      double best = std::numeric_limits<double>::infinity();
      for (int r = 0; r < config.repeats; ++r)
        best = std::min(best, solve_iterative(sys.matrix, rhs, so).report.seconds);

      CostRecord rec;
      rec.h = h;
      rec.n = cloud.size();
      rec.method = method;
      rec.setup_s = sys.setup_seconds;
      rec.solve_s = best / config.sweeps;
      rec.nnz = sys.matrix.nnz();
      const auto report = analyze(sys.matrix);
      rec.max_interior_row_nnz = report.max_interior_row_nnz;
      rec.interior_rows = cloud.count(Role::Interior) + cloud.count(Role::Neumann);
      rec.mean_candidates =
          rec.interior_rows ? static_cast<double>(sys.candidate_total) / static_cast<double>(rec.interior_rows) : 0.0;
      records.push_back(rec);
    }
  }
  return records;
}

std::vector<CostRatio> cost_ratios(const std::vector<CostRecord>& records) {
  std::vector<CostRatio> out;
  for (const auto& m : records) {
    if (m.method != Method::Mps) continue;
    for (const auto& l : records) {
      if (l.method != Method::Lsq || l.h != m.h) continue;
      CostRatio r;
      r.h = m.h;
      r.n = m.n;
      r.nnz_ratio = static_cast<double>(m.nnz) / static_cast<double>(l.nnz);
      r.setup_ratio = m.setup_s / l.setup_s;
      r.solve_ratio = m.solve_s / l.solve_s;
      out.push_back(r);
    }
  }
  return out;
}

void write_cost_csv(std::ostream& out, const std::vector<CostRecord>& records) {
  out << "h,n,method,setup_s,solve_s,nnz,mean_candidates\n";
  char buf[256];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof buf, "%.17g,%zu,%s,%.17g,%.17g,%zu,%.17g\n", r.h, r.n, to_string(r.method), r.setup_s,
                  r.solve_s, r.nnz, r.mean_candidates);
    out << buf;
  }
}

}  // namespace mpsfd
