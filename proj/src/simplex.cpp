#include "mpsfd/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "mpsfd/common.hpp"

namespace mpsfd {

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
  }
  return "unknown";
}

namespace {

void validate(const StandardLp& lp) {
  const auto k = lp.matrix.rows();
  const auto m = lp.matrix.cols();
  if (k < 1 || m < 1) throw std::invalid_argument("linear program needs at least one row and one column");
  if (lp.cost.size() != m) throw std::invalid_argument("cost length does not match the number of columns");
  if (lp.rhs.size() != k) throw std::invalid_argument("rhs length does not match the number of rows");
  if (!lp.matrix.allFinite() || !lp.cost.allFinite() || !lp.rhs.allFinite())
    throw std::invalid_argument("linear program has non-finite entries");
}

// Dense revised simplex over a row-major copy of the (sign-normalized)
// constraint matrix. Columns [0, m) are structural, column m + i is the
// artificial variable of original row i.
class RevisedSimplex {
 public:
  RevisedSimplex(const StandardLp& lp, const SimplexOptions& options)
      : m_(static_cast<std::size_t>(lp.matrix.cols())),
        k_(static_cast<std::size_t>(lp.matrix.rows())),
        options_(options),
        cost_(lp.cost.data(), lp.cost.data() + lp.cost.size()) {
    sign_.resize(k_);
    a_.resize(k_ * m_);
    b_.resize(k_);
    row_ids_.resize(k_);
    for (std::size_t i = 0; i < k_; ++i) {
      sign_[i] = lp.rhs(static_cast<Eigen::Index>(i)) < 0.0 ? -1.0 : 1.0;
      b_[i] = sign_[i] * lp.rhs(static_cast<Eigen::Index>(i));
      for (std::size_t j = 0; j < m_; ++j)
        a_[i * m_ + j] = sign_[i] * lp.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      row_ids_[i] = i;
    }
    tol_eq_ = residual_tolerance(lp, options);
    cost_max_ = 0.0;
    for (double c : cost_) cost_max_ = std::max(cost_max_, std::abs(c));
    max_pivots_ = options.max_pivots > 0 ? options.max_pivots : static_cast<int>(50 * (k_ + m_));
  }

  LpOutcome run() {
    LpOutcome out;
    // Phase I from the artificial basis.
    rows_ = k_;
    basis_.resize(rows_);
    is_basic_.assign(m_ + k_, false);
    for (std::size_t r = 0; r < rows_; ++r) {
      basis_[r] = m_ + r;
      is_basic_[m_ + r] = true;
    }
    binv_.assign(rows_ * rows_, 0.0);
    for (std::size_t r = 0; r < rows_; ++r) binv_[r * rows_ + r] = 1.0;
    xb_ = b_;

    phase_costs_.assign(m_ + k_, 0.0);
    for (std::size_t i = 0; i < k_; ++i) phase_costs_[m_ + i] = 1.0;
    phase_tol_ = options_.optimality_tolerance;
    const auto phase1 = iterate();
    (void)phase1;  // Phase I is bounded below by zero.

    double infeasibility = 0.0;
    for (std::size_t r = 0; r < rows_; ++r)
      if (basis_[r] >= m_) infeasibility += std::max(xb_[r], 0.0);

    if (infeasibility > tol_eq_) {
      const auto y = duals();
      out.status = LpStatus::Infeasible;
      out.certificate.resize(static_cast<Eigen::Index>(k_));
      for (std::size_t i = 0; i < k_; ++i) out.certificate(static_cast<Eigen::Index>(i)) = -sign_[i] * y[i];
      out.pivots = pivots_;
      return out;
    }

    drive_out_artificials();

    phase_costs_.assign(m_ + k_, 0.0);
    std::copy(cost_.begin(), cost_.end(), phase_costs_.begin());
    phase_tol_ = options_.optimality_tolerance * std::max(cost_max_, 1e-300);
    if (cost_max_ == 0.0) phase_tol_ = options_.optimality_tolerance;
    const bool bounded = iterate();
    out.pivots = pivots_;
    if (!bounded) {
      out.status = LpStatus::Unbounded;
      return out;
    }

    refactor();
    out.status = LpStatus::Optimal;
    out.solution = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m_));
    double scale = 1.0;
    for (double v : xb_) scale = std::max(scale, std::abs(v));
    for (std::size_t r = 0; r < rows_; ++r) {
      if (basis_[r] >= m_) continue;
      double v = xb_[r];
      if (v < 0.0 && v > -options_.sign_tolerance * scale) v = 0.0;
      out.solution(static_cast<Eigen::Index>(basis_[r])) = v;
      out.basis.push_back(basis_[r]);
    }
    std::sort(out.basis.begin(), out.basis.end());
    out.objective = 0.0;
    for (std::size_t j = 0; j < m_; ++j) out.objective += cost_[j] * out.solution(static_cast<Eigen::Index>(j));
    return out;
  }

 private:
  // Entry (row position p, column j) of the working constraint matrix.
  double entry(std::size_t p, std::size_t j) const {
    if (j < m_) return a_[row_ids_[p] * m_ + j];
    return row_ids_[p] == j - m_ ? 1.0 : 0.0;
  }

  std::vector<double> duals() const {
    std::vector<double> y(rows_, 0.0);
    for (std::size_t r = 0; r < rows_; ++r) {
      const double c = phase_costs_[basis_[r]];
      if (c == 0.0) continue;
      const double* row = &binv_[r * rows_];
      for (std::size_t i = 0; i < rows_; ++i) y[i] += c * row[i];
    }
    return y;
  }

  void direction(std::size_t j, std::vector<double>& u) const {
    u.assign(rows_, 0.0);
    for (std::size_t p = 0; p < rows_; ++p) {
      const double ap = entry(p, j);
      if (ap == 0.0) continue;
      for (std::size_t r = 0; r < rows_; ++r) u[r] += binv_[r * rows_ + p] * ap;
    }
  }

  void pivot(std::size_t leave, std::size_t enter, const std::vector<double>& u, double theta) {
    for (std::size_t r = 0; r < rows_; ++r) {
      if (r == leave) continue;
      xb_[r] -= theta * u[r];
    }
    xb_[leave] = theta;
    const double piv = u[leave];
    double* lrow = &binv_[leave * rows_];
    for (std::size_t i = 0; i < rows_; ++i) lrow[i] /= piv;
    for (std::size_t r = 0; r < rows_; ++r) {
      if (r == leave || u[r] == 0.0) continue;
      double* row = &binv_[r * rows_];
      const double f = u[r];
      for (std::size_t i = 0; i < rows_; ++i) row[i] -= f * lrow[i];
    }
    is_basic_[basis_[leave]] = false;
    basis_[leave] = enter;
    is_basic_[enter] = true;
    ++pivots_;
    if (pivots_ > max_pivots_) throw NumericalError("simplex exceeded its pivot limit of " + std::to_string(max_pivots_));
    if (pivots_ % 32 == 0) refactor();
  }

  void refactor() {
    Eigen::MatrixXd basis_matrix(static_cast<Eigen::Index>(rows_), static_cast<Eigen::Index>(rows_));
    for (std::size_t p = 0; p < rows_; ++p)
      for (std::size_t r = 0; r < rows_; ++r)
        basis_matrix(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(r)) = entry(p, basis_[r]);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(basis_matrix);
    if (!lu.isInvertible()) throw NumericalError("simplex basis became singular");
    const Eigen::MatrixXd inv = lu.inverse();
    binv_.resize(rows_ * rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t i = 0; i < rows_; ++i) binv_[r * rows_ + i] = inv(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i));
    xb_.assign(rows_, 0.0);
    double scale = 1.0;
    for (std::size_t r = 0; r < rows_; ++r) {
      for (std::size_t i = 0; i < rows_; ++i) xb_[r] += binv_[r * rows_ + i] * b_[row_ids_[i]];
      scale = std::max(scale, std::abs(xb_[r]));
    }
    for (double& v : xb_)
      if (v < 0.0 && v > -options_.sign_tolerance * scale) v = 0.0;
  }

  // Returns false when the phase objective is unbounded below.
  bool iterate() {
    std::vector<double> u;
    for (;;) {
      const auto y = duals();
      std::size_t enter = m_;
      for (std::size_t j = 0; j < m_; ++j) {
        if (is_basic_[j]) continue;
        double d = phase_costs_[j];
        for (std::size_t p = 0; p < rows_; ++p) d -= y[p] * a_[row_ids_[p] * m_ + j];
        if (d < -phase_tol_) {
          enter = j;
          break;
        }
      }
      if (enter == m_) return true;

      direction(enter, u);
      std::size_t leave = rows_;
      double best = 0.0;
      for (std::size_t r = 0; r < rows_; ++r) {
        if (u[r] <= options_.pivot_tolerance) continue;
        const double ratio = std::max(xb_[r], 0.0) / u[r];
        if (leave == rows_ || ratio < best - 1e-12 * std::max(1.0, best)) {
          leave = r;
          best = ratio;
        } else if (ratio <= best + 1e-12 * std::max(1.0, best) && basis_[r] < basis_[leave]) {
          leave = r;
          best = std::min(best, ratio);
        }
      }
      if (leave == rows_) return false;
      pivot(leave, enter, u, best);
    }
  }

  void drive_out_artificials() {
    std::vector<double> u;
    std::vector<std::size_t> redundant_rows;
    for (std::size_t r = 0; r < rows_; ++r) {
      if (basis_[r] < m_) continue;
      std::size_t enter = m_;
      for (std::size_t j = 0; j < m_; ++j) {
        if (is_basic_[j]) continue;
        double v = 0.0;
        for (std::size_t p = 0; p < rows_; ++p) v += binv_[r * rows_ + p] * a_[row_ids_[p] * m_ + j];
        if (std::abs(v) > options_.pivot_tolerance) {
          enter = j;
          break;
        }
      }
      if (enter == m_) {
        redundant_rows.push_back(r);
        continue;
      }
      direction(enter, u);
      pivot(r, enter, u, 0.0);
    }
    if (redundant_rows.empty()) {
      refactor();
      return;
    }
    // Row of the artificial at basis position r is a combination of the others.
    std::vector<bool> drop_row(k_, false);
    std::vector<bool> drop_pos(rows_, false);
    for (std::size_t r : redundant_rows) {
      drop_row[basis_[r] - m_] = true;
      drop_pos[r] = true;
      is_basic_[basis_[r]] = false;
    }
    std::vector<std::size_t> new_rows;
    for (std::size_t p = 0; p < rows_; ++p)
      if (!drop_row[row_ids_[p]]) new_rows.push_back(row_ids_[p]);
    std::vector<std::size_t> new_basis;
    for (std::size_t r = 0; r < rows_; ++r)
      if (!drop_pos[r]) new_basis.push_back(basis_[r]);
    row_ids_ = std::move(new_rows);
    basis_ = std::move(new_basis);
    rows_ = basis_.size();
    if (rows_ == 0) {
      binv_.clear();
      xb_.clear();
      return;
    }
    refactor();
  }

  std::size_t m_;
  std::size_t k_;
  SimplexOptions options_;
  std::vector<double> cost_;
  std::vector<double> sign_;
  std::vector<double> a_;
  std::vector<double> b_;
  std::vector<std::size_t> row_ids_;
  std::size_t rows_ = 0;
  std::vector<std::size_t> basis_;
  std::vector<bool> is_basic_;
  std::vector<double> binv_;
  std::vector<double> xb_;
  std::vector<double> phase_costs_;
  double phase_tol_ = 0.0;
  double tol_eq_ = 0.0;
  double cost_max_ = 0.0;
  int pivots_ = 0;
  int max_pivots_ = 0;
};

}  // namespace

double residual_tolerance(const StandardLp& lp, const SimplexOptions& options) {
  const double bmax = lp.rhs.size() > 0 ? lp.rhs.cwiseAbs().maxCoeff() : 0.0;
  return options.residual_scale * (1.0 + bmax);
}

LpOutcome solve_lp(const StandardLp& lp, const SimplexOptions& options) {
  validate(lp);
  RevisedSimplex simplex(lp, options);
  return simplex.run();
}

std::vector<BasicSolution> enumerate_basic_solutions(const StandardLp& lp, double feasibility_tolerance) {
  validate(lp);
  const auto k = static_cast<std::size_t>(lp.matrix.rows());
  const auto m = static_cast<std::size_t>(lp.matrix.cols());
  if (m > kMaxEnumerationColumns)
    throw std::invalid_argument("basis enumeration limited to " + std::to_string(kMaxEnumerationColumns) + " columns");
  std::vector<BasicSolution> out;
  if (k > m) return out;

  const double tol_eq = residual_tolerance(lp);
  std::vector<std::size_t> subset(k);
  std::iota(subset.begin(), subset.end(), 0);
  Eigen::MatrixXd basis_matrix(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
  for (;;) {
    for (std::size_t r = 0; r < k; ++r) basis_matrix.col(static_cast<Eigen::Index>(r)) = lp.matrix.col(static_cast<Eigen::Index>(subset[r]));
    Eigen::FullPivLU<Eigen::MatrixXd> lu(basis_matrix);
    if (lu.rank() == static_cast<Eigen::Index>(k)) {
      const Eigen::VectorXd xb = lu.solve(lp.rhs);
      const double resid = (basis_matrix * xb - lp.rhs).cwiseAbs().maxCoeff();
      if (resid <= 1e3 * tol_eq && xb.minCoeff() >= -feasibility_tolerance) {
        BasicSolution bs;
        bs.basis = subset;
        bs.solution = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
        for (std::size_t r = 0; r < k; ++r)
          bs.solution(static_cast<Eigen::Index>(subset[r])) = std::max(xb(static_cast<Eigen::Index>(r)), 0.0);
        bs.objective = lp.cost.dot(bs.solution);
        out.push_back(std::move(bs));
      }
    }
    // Next combination in lexicographic order.
    std::size_t i = k;
    while (i > 0 && subset[i - 1] == m - k + (i - 1)) --i;
    if (i == 0) break;
    ++subset[i - 1];
    for (std::size_t j = i; j < k; ++j) subset[j] = subset[j - 1] + 1;
  }
  std::stable_sort(out.begin(), out.end(), [](const BasicSolution& a, const BasicSolution& b) { return a.objective < b.objective; });
  return out;
}

}  // namespace mpsfd
