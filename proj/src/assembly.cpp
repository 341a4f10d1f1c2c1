#include "mpsfd/assembly.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>
#include <exception>
#include <limits>
#include <string>
#include <thread>

#include "mpsfd/random.hpp"

namespace mpsfd {

RhsAssembler::RhsAssembler(const PointCloud& cloud)
    : points_(cloud.points()), roles_(cloud.roles()), normals_(cloud.normals()) {}

std::vector<double> RhsAssembler::operator()(const BoundaryData& data) const {
  std::vector<double> rhs(points_.size());
  for (std::size_t i = 0; i < points_.size(); ++i) {
    switch (roles_[i]) {
      case Role::Interior: rhs[i] = data.source(points_[i]); break;
      case Role::Dirichlet: rhs[i] = data.dirichlet(points_[i]); break;
      case Role::Neumann: rhs[i] = data.flux(points_[i], normals_[i]); break;
    }
  }
  return rhs;
}

namespace {

std::string certificate_text(const Eigen::VectorXd& w) {
  std::string s = "(";
  char buf[40];
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%s%.6g", i ? ", " : "", w(i));
    s += buf;
  }
  return s + ")";
}

std::string point_text(const Point& x) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "(%.6g, %.6g, %.6g)", x[0], x[1], x[2]);
  return buf;
}

using Row = std::vector<std::pair<std::size_t, double>>;

Row stencil_row(const PointCloud& cloud, const Domain& domain, std::size_t i, const AssemblyOptions& options,
                std::size_t& candidate_count) {
  if (cloud.role(i) == Role::Dirichlet) return {{i, 1.0}};
  auto ps = build_point_stencil(cloud, domain, i, options);
  candidate_count = ps.candidates.size();
  if (auto* bad = std::get_if<InfeasibilityReport>(&ps.result))
    throw InfeasibleStencilError(i, cloud.point(i), std::move(*bad));
  const auto& st = std::get<Stencil>(ps.result);
  Row row;
  row.reserve(st.neighbors.size() + 1);
  row.emplace_back(i, -st.center_coefficient);
  for (std::size_t t = 0; t < st.neighbors.size(); ++t)
    row.emplace_back(ps.candidates[st.neighbors[t]], -st.coefficients[t]);
  return row;
}

}  // namespace

InfeasibleStencilError::InfeasibleStencilError(std::size_t point, const Point& x, InfeasibilityReport report)
    : NumericalError("no positive stencil at point " + std::to_string(point) + " " + point_text(x) +
                     ": Farkas certificate w = " + certificate_text(report.certificate)),
      point_(point),
      report_(std::move(report)) {}

PointStencil build_point_stencil(const PointCloud& cloud, const Domain& domain, std::size_t center,
                                 const AssemblyOptions& options) {
  require(center < cloud.size(), "point index out of range");
  require(options.mesh_size > 0.0, "assembly needs a positive mesh size");
  const int dim = cloud.dim();
  const double radius =
      candidate_radius(options.mesh_size, ConeCriterionParams::for_dimension(dim, 1), options.radius_factor);

  PointStencil ps;
  ps.center = center;
  ps.candidates = neighbors_within(cloud, center, radius);
  if (options.visibility_samples > 0) {
    const auto& x0 = cloud.point(center);
    std::erase_if(ps.candidates, [&](std::size_t j) {
      return !visible_from(domain, x0, cloud.point(j), options.visibility_samples);
    });
  }
  if (ps.candidates.empty())
    throw NumericalError("point " + std::to_string(center) + " has no candidates within radius " +
                         std::to_string(radius));

  const auto& x0 = cloud.point(center);
  std::vector<Point> offsets;
  offsets.reserve(ps.candidates.size());
  if (cloud.role(center) == Role::Neumann) {
    const auto frame = local_frame(-1.0 * cloud.normal(center), dim);
    for (std::size_t j : ps.candidates) {
      const Point d = cloud.point(j) - x0;
      offsets.push_back({dot(d, frame[0]), dot(d, frame[1]), dim == 3 ? dot(d, frame[2]) : 0.0});
    }
    ps.constraints = build_constraints(offsets, dim, options.alpha, ConstraintKind::NeumannNormal, 0);
  } else {
    for (std::size_t j : ps.candidates) offsets.push_back(cloud.point(j) - x0);
    ps.constraints = build_constraints(offsets, dim, options.alpha, ConstraintKind::Laplace);
  }

  try {
    if (options.method == Method::Lsq)
      ps.result = lsq_stencil(ps.constraints);
    else
      ps.result = mps_stencil(ps.constraints, options.simplex);
  } catch (const RankDeficientError& e) {
    throw NumericalError("point " + std::to_string(center) + " " + point_text(x0) + ": " + e.what());
  }
  if (auto* st = std::get_if<Stencil>(&ps.result)) st->center = center;
  return ps;
}

AssembledSystem assemble(const PointCloud& cloud, const Domain& domain, const AssemblyOptions& options) {
  require(cloud.dim() == domain.dim(), "cloud and domain dimensions differ");
  require(options.mesh_size > 0.0, "assembly needs a positive mesh size");
  require(options.threads >= 1, "thread count must be positive");
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n = cloud.size();

  std::vector<Row> rows(n);
  std::vector<std::size_t> candidates(n, 0);
  std::vector<std::exception_ptr> failures(n);
  auto work = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      try {
        rows[i] = stencil_row(cloud, domain, i, options, candidates[i]);
      } catch (...) {
        failures[i] = std::current_exception();
        return;
      }
    }
  };
  const auto threads = std::min<std::size_t>(static_cast<std::size_t>(options.threads), std::max<std::size_t>(n, 1));
  if (threads == 1) {
    work(0, n);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t block = (n + threads - 1) / threads;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work, std::min(n, t * block), std::min(n, (t + 1) * block));
  }
  for (const auto& f : failures)
    if (f) std::rethrow_exception(f);

  AssembledSystem sys;
  sys.matrix = SparseMatrix::from_rows(std::move(rows), cloud.roles());
  sys.rhs = RhsAssembler(cloud);
  sys.candidate_radius =
      candidate_radius(options.mesh_size, ConeCriterionParams::for_dimension(cloud.dim(), 1), options.radius_factor);
  for (std::size_t c : candidates) sys.candidate_total += c;

  std::vector<char> used(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (cloud.role(i) == Role::Dirichlet) continue;
    for (std::size_t t = sys.matrix.row_ptr[i]; t < sys.matrix.row_ptr[i + 1]; ++t) used[sys.matrix.cols[t]] = 1;
  }
  for (std::size_t i = 0; i < n; ++i)
    if (cloud.role(i) == Role::Dirichlet && !used[i]) sys.unused_dirichlet.push_back(i);

  sys.setup_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return sys;
}

MatrixReport analyze(const SparseMatrix& a, double dominance_tolerance) {
  MatrixReport r;
  r.is_l_matrix = true;
  r.weakly_dominant = true;
  r.nnz = a.nnz();
  r.min_row_nnz = a.n ? a.row_size(0) : 0;
  std::vector<std::vector<std::size_t>> dependents(a.n);
  for (std::size_t i = 0; i < a.n; ++i) {
    double diag = 0.0, off = 0.0, sum = 0.0;
    for (std::size_t t = a.row_ptr[i]; t < a.row_ptr[i + 1]; ++t) {
      const std::size_t j = a.cols[t];
      const double v = a.values[t];
      sum += v;
      if (j == i) {
        diag = v;
        continue;
      }
      off += std::abs(v);
      if (v > 0.0) r.is_l_matrix = false;
      if (v != 0.0) dependents[j].push_back(i);
    }
    if (!(diag > 0.0)) r.is_l_matrix = false;
    if (std::abs(diag) < off - dominance_tolerance * std::abs(diag)) r.weakly_dominant = false;
    r.min_row_nnz = std::min(r.min_row_nnz, a.row_size(i));
    r.max_row_nnz = std::max(r.max_row_nnz, a.row_size(i));
    if (a.roles[i] == Role::Interior) {
      r.max_interior_row_nnz = std::max(r.max_interior_row_nnz, a.row_size(i));
      const double rel = diag != 0.0 ? std::abs(sum) / std::abs(diag) : std::abs(sum);
      r.max_interior_row_sum = std::max(r.max_interior_row_sum, rel);
    }
  }
  r.mean_row_nnz = a.n ? static_cast<double>(a.nnz()) / static_cast<double>(a.n) : 0.0;

  // Row i depends on column j when a_ij != 0; walk those edges backwards
  // from the Dirichlet rows.
  std::vector<char> reached(a.n, 0);
  std::deque<std::size_t> queue;
  for (std::size_t i = 0; i < a.n; ++i)
    if (a.roles[i] == Role::Dirichlet) {
      reached[i] = 1;
      queue.push_back(i);
    }
  while (!queue.empty()) {
    const std::size_t j = queue.front();
    queue.pop_front();
    for (std::size_t i : dependents[j])
      if (!reached[i]) {
        reached[i] = 1;
        queue.push_back(i);
      }
  }
  for (std::size_t i = 0; i < a.n; ++i)
    if (!reached[i]) r.unreachable.push_back(i);
  return r;
}

MaxPrincipleResult discrete_max_principle_test(const SparseMatrix& matrix, const LinearSolve& solve, int trials,
                                               std::uint64_t seed, double tolerance) {
  require(trials >= 1, "at least one trial required");
  Rng rng(seed);
  MaxPrincipleResult out;
  out.passed = true;
  out.worst_ratio = -std::numeric_limits<double>::infinity();
  for (int t = 0; t < trials; ++t) {
    std::vector<double> rhs(matrix.n);
    double scale = 0.0;
    for (auto& v : rhs) {
      v = -rng.uniform();
      scale = std::max(scale, std::abs(v));
    }
    const auto x = solve(matrix, rhs);
    const double top = x.empty() ? 0.0 : *std::max_element(x.begin(), x.end());
    const double ratio = scale > 0.0 ? top / scale : top;
    out.worst_ratio = std::max(out.worst_ratio, ratio);
    if (ratio > tolerance) out.passed = false;
  }
  return out;
}

}  // namespace mpsfd
