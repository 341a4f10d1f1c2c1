#include "mpsfd/stencil.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mpsfd {

int constraint_count(int dim, ConstraintKind kind) {
  require_dimension(dim);
  return kind == ConstraintKind::Laplace ? dim * (dim + 3) / 2 : dim;
}

namespace {

// Monomial column of one offset; also gives the polynomial degree per row.
void fill_column(const Point& x, int dim, ConstraintKind kind, double* col) {
  if (kind == ConstraintKind::NeumannNormal) {
    for (int a = 0; a < dim; ++a) col[a] = x[a];
    return;
  }
  if (dim == 2) {
    col[0] = x[0];
    col[1] = x[1];
    col[2] = x[0] * x[1];
    col[3] = x[0] * x[0];
    col[4] = x[1] * x[1];
  } else {
    col[0] = x[0];
    col[1] = x[1];
    col[2] = x[2];
    col[3] = x[0] * x[1];
    col[4] = x[0] * x[2];
    col[5] = x[1] * x[2];
    col[6] = x[0] * x[0];
    col[7] = x[1] * x[1];
    col[8] = x[2] * x[2];
  }
}

int row_degree(int row, int dim, ConstraintKind kind) {
  if (kind == ConstraintKind::NeumannNormal) return 1;
  return row < dim ? 1 : 2;
}

Eigen::VectorXd constraint_rhs(int dim, ConstraintKind kind, int normal_axis) {
  const int k = constraint_count(dim, kind);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(k);
  if (kind == ConstraintKind::Laplace)
    b.tail(dim).setConstant(2.0);
  else
    b(normal_axis) = 1.0;
  return b;
}

// The constraint system rewritten for offsets divided by their largest norm
// rho. A solution s_hat of the scaled system maps back as s = s_hat / rho^p
// with p = 2 (Laplace) or 1 (normal derivative).
struct ScaledSystem {
  Eigen::MatrixXd vandermonde;
  Eigen::VectorXd weights;
  double rho = 1.0;
  int order = 2;
};

ScaledSystem scaled(const ConstraintSystem& cs) {
  ScaledSystem out;
  const auto m = static_cast<Eigen::Index>(cs.offsets.size());
  const int k = constraint_count(cs.dim, cs.kind);
  out.order = cs.kind == ConstraintKind::Laplace ? 2 : 1;
  out.rho = 0.0;
  for (const auto& x : cs.offsets) out.rho = std::max(out.rho, norm(x));
  out.vandermonde.resize(k, m);
  out.weights.resize(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const Point xh = (1.0 / out.rho) * cs.offsets[static_cast<std::size_t>(j)];
    fill_column(xh, cs.dim, cs.kind, out.vandermonde.col(j).data());
    out.weights(j) = std::pow(norm(xh), -cs.alpha);
  }
  return out;
}

Stencil finish(Method method, const ConstraintSystem& cs, std::vector<std::size_t> slots, std::vector<double> values) {
  Stencil st;
  st.method = method;
  st.neighbors = std::move(slots);
  st.coefficients = std::move(values);
  double sum = 0.0;
  bool positive = true;
  for (double v : st.coefficients) {
    sum += v;
    if (v < 0.0) positive = false;
  }
  st.center_coefficient = -sum;
  st.positive = positive;
  (void)cs;
  return st;
}

}  // namespace

RankDeficientError::RankDeficientError(std::size_t constraints, std::size_t rank, std::size_t candidates)
    : NumericalError("least-squares normal matrix is rank deficient: rank " + std::to_string(rank) + " of " +
                     std::to_string(constraints) + " constraints (" + std::to_string(candidates) + " candidates)"),
      constraints_(constraints),
      rank_(rank) {}

ConstraintSystem build_constraints(std::span<const Point> offsets, int dim, double alpha, ConstraintKind kind,
                                   int normal_axis) {
  require_dimension(dim);
  require(std::isfinite(alpha) && alpha > 2.0, "weight exponent alpha must exceed 2");
  require(!offsets.empty(), "constraint system needs at least one offset");
  require(normal_axis >= 0 && normal_axis < dim, "normal axis out of range");

  double rho = 0.0;
  for (const auto& x : offsets) rho = std::max(rho, norm(x));
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    const double n = norm(offsets[i]);
    if (!(n > 1e-13 * rho) || !std::isfinite(n))
      throw std::invalid_argument("candidate " + std::to_string(i) + " coincides with the approximation point");
  }

  ConstraintSystem cs;
  cs.dim = dim;
  cs.kind = kind;
  cs.normal_axis = normal_axis;
  cs.alpha = alpha;
  cs.offsets.assign(offsets.begin(), offsets.end());
  for (auto& x : cs.offsets)
    for (int a = dim; a < 3; ++a) x[a] = 0.0;
  const int k = constraint_count(dim, kind);
  const auto m = static_cast<Eigen::Index>(offsets.size());
  cs.vandermonde.resize(k, m);
  cs.weights.resize(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const auto& x = cs.offsets[static_cast<std::size_t>(j)];
    fill_column(x, dim, kind, cs.vandermonde.col(j).data());
    cs.weights(j) = std::pow(norm(x), -alpha);
  }
  cs.rhs = constraint_rhs(dim, kind, normal_axis);
  return cs;
}

Stencil lsq_stencil(const ConstraintSystem& cs) {
  const auto sys = scaled(cs);
  const auto k = sys.vandermonde.rows();
  const Eigen::MatrixXd wvt = sys.weights.asDiagonal() * sys.vandermonde.transpose();
  const Eigen::MatrixXd normal = sys.vandermonde * wvt;
  Eigen::LLT<Eigen::MatrixXd> llt(normal);
  if (llt.info() != Eigen::Success || llt.rcond() < 1e-13) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(normal, Eigen::EigenvaluesOnly);
    const double top = eig.eigenvalues().cwiseAbs().maxCoeff();
    std::size_t rank = 0;
    for (Eigen::Index i = 0; i < k; ++i)
      if (eig.eigenvalues()(i) > 1e-13 * top) ++rank;
    throw RankDeficientError(static_cast<std::size_t>(k), rank, cs.cols());
  }
  const Eigen::VectorXd s = wvt * llt.solve(cs.rhs) / std::pow(sys.rho, sys.order);

  std::vector<std::size_t> slots(cs.cols());
  std::vector<double> values(cs.cols());
  for (std::size_t j = 0; j < cs.cols(); ++j) {
    slots[j] = j;
    values[j] = s(static_cast<Eigen::Index>(j));
  }
  return finish(Method::Lsq, cs, std::move(slots), std::move(values));
}

StencilResult mps_stencil(const ConstraintSystem& cs, const SimplexOptions& options) {
  const auto sys = scaled(cs);
  StandardLp lp;
  lp.matrix = sys.vandermonde;
  lp.rhs = cs.rhs;
  lp.cost = sys.weights.cwiseInverse();
  const auto outcome = solve_lp(lp, options);

  if (outcome.status == LpStatus::Infeasible) {
    // Undo the row scaling so the certificate refers to the unscaled V.
    InfeasibilityReport report;
    report.certificate = outcome.certificate;
    for (Eigen::Index r = 0; r < report.certificate.size(); ++r)
      report.certificate(r) /= std::pow(sys.rho, row_degree(static_cast<int>(r), cs.dim, cs.kind));
    const Eigen::VectorXd slack = cs.vandermonde.transpose() * report.certificate;
    report.min_dual_slack = slack.minCoeff();
    report.gap = cs.rhs.dot(report.certificate);
    report.pivots = outcome.pivots;
    return report;
  }
  if (outcome.status != LpStatus::Optimal) throw NumericalError("stencil linear program is unbounded");

  const double top = outcome.solution.maxCoeff();
  const double scale = std::pow(sys.rho, sys.order);
  std::vector<std::size_t> slots;
  std::vector<double> values;
  for (std::size_t j : outcome.basis) {
    const double v = outcome.solution(static_cast<Eigen::Index>(j));
    if (v <= 1e-12 * top) continue;
    slots.push_back(j);
    values.push_back(v / scale);
  }
  auto st = finish(Method::Mps, cs, std::move(slots), std::move(values));
  st.pivots = outcome.pivots;
  st.objective = outcome.objective * std::pow(sys.rho, cs.alpha - sys.order);
  return st;
}

StencilResult neumann_stencil(const ConstraintSystem& cs, Method method) {
  require(cs.kind == ConstraintKind::NeumannNormal, "neumann_stencil needs a NeumannNormal constraint system");
  if (method == Method::Lsq) return lsq_stencil(cs);
  return mps_stencil(cs);
}

double verify_consistency(const Stencil& stencil, std::span<const Point> offsets, int dim, ConstraintKind kind,
                          int normal_axis) {
  require(offsets.size() == stencil.coefficients.size(), "offsets must align with stencil coefficients");
  const int k = constraint_count(dim, kind);
  const Eigen::VectorXd b = constraint_rhs(dim, kind, normal_axis);
  Eigen::VectorXd sums = Eigen::VectorXd::Zero(k);
  double total = stencil.center_coefficient;
  double col[9];
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    fill_column(offsets[i], dim, kind, col);
    for (int r = 0; r < k; ++r) sums(r) += stencil.coefficients[i] * col[r];
    total += stencil.coefficients[i];
  }
  return std::max(std::abs(total), (sums - b).cwiseAbs().maxCoeff());
}

std::vector<Point> stencil_offsets(const Stencil& stencil, const ConstraintSystem& cs) {
  std::vector<Point> out;
  out.reserve(stencil.neighbors.size());
  for (std::size_t j : stencil.neighbors) out.push_back(cs.offsets.at(j));
  return out;
}

std::array<Point, 3> local_frame(const Point& first, int dim) {
  require_dimension(dim);
  const double n = norm(first);
  require(n > 0.0, "frame axis must be nonzero");
  std::array<Point, 3> frame{};
  frame[0] = (1.0 / n) * first;
  if (dim == 2) {
    frame[1] = {-frame[0][1], frame[0][0], 0.0};
    return frame;
  }
  int axis = 0;
  for (int a = 1; a < 3; ++a)
    if (std::abs(frame[0][a]) < std::abs(frame[0][axis])) axis = a;
  Point e{0, 0, 0};
  e[axis] = 1.0;
  Point t = e - dot(e, frame[0]) * frame[0];
  frame[1] = (1.0 / norm(t)) * t;
  frame[2] = cross(frame[0], frame[1]);
  return frame;
}

}  // namespace mpsfd
