#include "mpsfd/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <thread>

#include <Eigen/Dense>

namespace mpsfd {

const char* to_string(SolverMethod method) {
  switch (method) {
    case SolverMethod::Jacobi: return "jacobi";
    case SolverMethod::GaussSeidel: return "gs";
    case SolverMethod::BiCGStab: return "bicgstab";
  }
  return "?";
}

SolverMethod parse_solver(const std::string& name) {
  if (name == "jacobi") return SolverMethod::Jacobi;
  if (name == "gs") return SolverMethod::GaussSeidel;
  if (name == "bicgstab") return SolverMethod::BiCGStab;
  throw std::invalid_argument("unknown solver '" + name + "'");
}

BreakdownError::BreakdownError(std::size_t iteration, const std::string& what)
    : NumericalError("BiCGStab breakdown at iteration " + std::to_string(iteration) + ": " + what),
      iteration_(iteration) {}

namespace {

void matvec_rows(const SparseMatrix& a, const double* x, double* y, std::size_t lo, std::size_t hi) {
  for (std::size_t i = lo; i < hi; ++i) {
    double sum = 0.0;
    for (std::size_t t = a.row_ptr[i]; t < a.row_ptr[i + 1]; ++t) sum += a.values[t] * x[a.cols[t]];
    y[i] = sum;
  }
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

std::vector<double> diagonal_of(const SparseMatrix& a, bool must_be_nonzero) {
  std::vector<double> d(a.n);
  for (std::size_t i = 0; i < a.n; ++i) {
    d[i] = a.diagonal(i);
    if (must_be_nonzero) require(d[i] != 0.0, "zero diagonal in row " + std::to_string(i));
  }
  return d;
}

class Residual {
 public:
  Residual(const SparseMatrix& a, const std::vector<double>& b, int threads)
      : a_(a), b_(b), threads_(threads), bnorm_(norm2(b)) {}

  // r = b - A x; returns |r|_2 / |b|_2.
  double operator()(const std::vector<double>& x, std::vector<double>& r) {
    r.resize(b_.size());
    if (threads_ > 1) {
      matvec(a_, x, r, threads_);
      for (std::size_t i = 0; i < r.size(); ++i) r[i] = b_[i] - r[i];
      return relative(norm2(r));
    }
    double sq = 0.0;
    for (std::size_t i = 0; i < a_.n; ++i) {
      double sum = 0.0;
      for (std::size_t t = a_.row_ptr[i]; t < a_.row_ptr[i + 1]; ++t) sum += a_.values[t] * x[a_.cols[t]];
      r[i] = b_[i] - sum;
      sq += r[i] * r[i];
    }
    return relative(std::sqrt(sq));
  }

  double relative(double abs) const { return bnorm_ > 0.0 ? abs / bnorm_ : abs; }

 private:
  const SparseMatrix& a_;
  const std::vector<double>& b_;
  int threads_;
  double bnorm_;
};

void run_jacobi(const SparseMatrix& a, std::vector<double>& x, Residual& residual, const SolverOptions& opt,
                std::size_t max_iter, SolveReport& rep) {
  const auto d = diagonal_of(a, true);
  std::vector<double> r;
  double rel = residual(x, r);
  rep.history.push_back(rel);
  while (rel > opt.tol && rep.iterations < max_iter) {
    for (std::size_t i = 0; i < a.n; ++i) x[i] += r[i] / d[i];
    rel = residual(x, r);
    rep.history.push_back(rel);
    ++rep.iterations;
  }
  rep.relative_residual = rel;
}

void run_gauss_seidel(const SparseMatrix& a, std::vector<double>& x, const std::vector<double>& b,
                      Residual& residual, const SolverOptions& opt, std::size_t max_iter, SolveReport& rep) {
  auto inv = diagonal_of(a, true);
  for (auto& v : inv) v = 1.0 / v;
  std::vector<double> r;
  double rel = residual(x, r);
  rep.history.push_back(rel);
  while (rel > opt.tol && rep.iterations < max_iter) {
    // Full row product, then the diagonal term is added back.
    for (std::size_t i = 0; i < a.n; ++i) {
      double sum = b[i];
      for (std::size_t t = a.row_ptr[i]; t < a.row_ptr[i + 1]; ++t) sum -= a.values[t] * x[a.cols[t]];
      x[i] += sum * inv[i];
    }
    rel = residual(x, r);
    rep.history.push_back(rel);
    ++rep.iterations;
  }
  rep.relative_residual = rel;
}

void run_bicgstab(const SparseMatrix& a, std::vector<double>& x, Residual& residual, const SolverOptions& opt,
                  std::size_t max_iter, SolveReport& rep) {
  constexpr double kBreakdown = 1e-30;
  const std::size_t n = a.n;
  std::vector<double> inv(n, 1.0);
  if (opt.precondition) {
    const auto d = diagonal_of(a, false);
    for (std::size_t i = 0; i < n; ++i) inv[i] = d[i] != 0.0 ? 1.0 / d[i] : 1.0;
  }
  std::vector<double> r, rhat, p(n), v(n), phat(n), s(n), shat(n), t(n);
  double rel = residual(x, r);
  rep.history.push_back(rel);

  // Restart from the true residual whenever the recursive one claims
  // convergence but the true one disagrees.
  while (rel > opt.tol && rep.iterations < max_iter) {
    rhat = r;
    std::fill(p.begin(), p.end(), 0.0);
    std::fill(v.begin(), v.end(), 0.0);
    double rho_old = 1.0, alpha = 1.0, omega = 1.0;
    double rec = rel;
    while (rec > opt.tol && rep.iterations < max_iter) {
      const std::size_t it = rep.iterations + 1;
      const double rho = dot(rhat, r);
      if (std::abs(rho) < kBreakdown) throw BreakdownError(it, "rho vanished");
      const double beta = (rho / rho_old) * (alpha / omega);
      for (std::size_t i = 0; i < n; ++i) {
        p[i] = r[i] + beta * (p[i] - omega * v[i]);
        phat[i] = inv[i] * p[i];
      }
      matvec(a, phat, v, opt.threads);
      const double rv = dot(rhat, v);
      if (std::abs(rv) < kBreakdown) throw BreakdownError(it, "(r0, v) vanished");
      alpha = rho / rv;
      for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
      const double srel = residual.relative(norm2(s));
      if (srel <= opt.tol) {
        for (std::size_t i = 0; i < n; ++i) x[i] += alpha * phat[i];
        rep.iterations = it;
        rec = srel;
        rep.history.push_back(srel);
        break;
      }
      for (std::size_t i = 0; i < n; ++i) shat[i] = inv[i] * s[i];
      matvec(a, shat, t, opt.threads);
      const double tt = dot(t, t);
      if (tt < kBreakdown) throw BreakdownError(it, "|t| vanished");
      omega = dot(t, s) / tt;
      if (std::abs(omega) < kBreakdown) throw BreakdownError(it, "omega vanished");
      for (std::size_t i = 0; i < n; ++i) {
        x[i] += alpha * phat[i] + omega * shat[i];
        r[i] = s[i] - omega * t[i];
      }
      rho_old = rho;
      rec = residual.relative(norm2(r));
      rep.history.push_back(rec);
      rep.iterations = it;
    }
    rel = residual(x, r);
    rep.history.back() = rel;
  }
  rep.relative_residual = rel;
}

}  // namespace

void matvec(const SparseMatrix& a, const std::vector<double>& x, std::vector<double>& y, int threads) {
  require(x.size() == a.n, "matvec size mismatch");
  y.resize(a.n);
  const auto blocks = static_cast<std::size_t>(std::max(1, threads));
  if (blocks == 1 || a.n < 2 * blocks) {
    matvec_rows(a, x.data(), y.data(), 0, a.n);
    return;
  }
  const std::size_t block = (a.n + blocks - 1) / blocks;
  std::vector<std::jthread> pool;
  for (std::size_t b = 0; b < blocks; ++b)
    pool.emplace_back(matvec_rows, std::cref(a), x.data(), y.data(), std::min(a.n, b * block),
                      std::min(a.n, (b + 1) * block));
}

std::vector<double> matvec(const SparseMatrix& a, const std::vector<double>& x, int threads) {
  std::vector<double> y;
  matvec(a, x, y, threads);
  return y;
}

SolveResult solve_iterative(const SparseMatrix& a, const std::vector<double>& rhs, const SolverOptions& options,
                            std::vector<double> x0) {
  require(rhs.size() == a.n, "rhs size mismatch");
  require(options.tol > 0.0, "tolerance must be positive");
  if (x0.empty()) x0.assign(a.n, 0.0);
  require(x0.size() == a.n, "initial guess size mismatch");
  const std::size_t max_iter = options.max_iter ? options.max_iter : 100 * std::max<std::size_t>(a.n, 1);

  const auto start = std::chrono::steady_clock::now();
  SolveResult out;
  out.solution = std::move(x0);
  out.report.method = options.method;
  Residual residual(a, rhs, options.threads);
  switch (options.method) {
    case SolverMethod::Jacobi: run_jacobi(a, out.solution, residual, options, max_iter, out.report); break;
    case SolverMethod::GaussSeidel:
      run_gauss_seidel(a, out.solution, rhs, residual, options, max_iter, out.report);
      break;
    case SolverMethod::BiCGStab: run_bicgstab(a, out.solution, residual, options, max_iter, out.report); break;
  }
  out.report.converged = out.report.relative_residual <= options.tol;
  out.report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

std::vector<double> dense_solve(const SparseMatrix& a, const std::vector<double>& rhs) {
  require(rhs.size() == a.n, "rhs size mismatch");
  const auto n = static_cast<Eigen::Index>(a.n);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < a.n; ++i)
    for (std::size_t t = a.row_ptr[i]; t < a.row_ptr[i + 1]; ++t)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(a.cols[t])) = a.values[t];
  const Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(rhs.data(), n);
  const Eigen::VectorXd x = m.fullPivLu().solve(b);
  return {x.data(), x.data() + n};
}

void write_vector(std::ostream& out, const std::vector<double>& v) {
  char buf[40];
  for (double x : v) {
    std::snprintf(buf, sizeof buf, "%.17g\n", x);
    out << buf;
  }
}

std::vector<double> read_vector(std::istream& in) {
  std::vector<double> v;
  double x = 0.0;
  while (in >> x) v.push_back(x);
  if (!in.eof()) throw Error("malformed vector file near entry " + std::to_string(v.size() + 1));
  return v;
}

}  // namespace mpsfd
