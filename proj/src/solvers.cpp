#include "blebsim/solvers.hpp"

#include <Eigen/SparseLU>
#include <Eigen/SparseCore>
#include <cmath>
#include <cstdio>
#include <mutex>

#include "blebsim/error.hpp"

namespace blebsim {
namespace {

std::string fmt_residual(const char* what, double r, int it) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%s did not converge: relative residual %.3e after %d iterations", what, r, it);
  return buf;
}

void remove_mean(std::span<double> x) {
  if (x.empty()) return;
  const double m = sum(x) / static_cast<double>(x.size());
  for (double& v : x) v -= m;
}

void check_square(const SparseMatrix& a, std::size_t nb) {
  if (a.rows() != a.cols()) throw ValidationError("solver: matrix is not square");
  if (static_cast<std::size_t>(a.rows()) != nb) throw ValidationError("solver: right-hand side has wrong length");
}

// ILU(0): factors share the sparsity of A. L is unit lower, U upper.
struct Ilu0 {
  std::vector<int> offsets, cols, diag;
  std::vector<double> vals;

  explicit Ilu0(const SparseMatrix& a)
      : offsets(a.row_offsets()), cols(a.col_indices()), diag(a.rows(), -1), vals(a.values()) {
    const int n = a.rows();
    for (int i = 0; i < n; ++i)
      for (int k = offsets[i]; k < offsets[i + 1]; ++k)
        if (cols[k] == i) diag[i] = k;
    for (int i = 0; i < n; ++i)
      if (diag[i] < 0) throw SolverError("ILU(0): structurally zero diagonal");
    std::vector<int> pos(n, -1);
    for (int i = 0; i < n; ++i) {
      for (int k = offsets[i]; k < offsets[i + 1]; ++k) pos[cols[k]] = k;
      for (int k = offsets[i]; k < offsets[i + 1] && cols[k] < i; ++k) {
        const int j = cols[k];
        const double piv = vals[diag[j]];
        if (piv == 0.0) throw SolverError("ILU(0): zero pivot");
        vals[k] /= piv;
        for (int m = diag[j] + 1; m < offsets[j + 1]; ++m)
          if (pos[cols[m]] >= 0) vals[pos[cols[m]]] -= vals[k] * vals[m];
      }
      for (int k = offsets[i]; k < offsets[i + 1]; ++k) pos[cols[k]] = -1;
    }
  }

  void apply(std::span<const double> r, std::span<double> z) const {
    const int n = static_cast<int>(diag.size());
    for (int i = 0; i < n; ++i) {
      double s = r[i];
      for (int k = offsets[i]; k < diag[i]; ++k) s -= vals[k] * z[cols[k]];
      z[i] = s;
    }
    for (int i = n - 1; i >= 0; --i) {
      double s = z[i];
      for (int k = diag[i] + 1; k < offsets[i + 1]; ++k) s -= vals[k] * z[cols[k]];
      z[i] = s / vals[diag[i]];
    }
  }
};

bool bicgstab(const SparseMatrix& a, const Ilu0& m, std::span<const double> b, std::vector<double>& x,
              const SolverOptions& opt, SolveReport& rep) {
  const int n = a.rows();
  const double bnorm = norm2(b);
  rep.history.clear();
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    rep.relative_residual = 0.0;
    rep.history.push_back(0.0);
    return true;
  }
  std::vector<double> r(n), rhat, p(n, 0.0), v(n, 0.0), s(n), t(n), phat(n), shat(n);
  a.multiply(x, r);
  for (int i = 0; i < n; ++i) r[i] = b[i] - r[i];
  rhat = r;
  double rho = 1.0, alpha = 1.0, omega = 1.0;
  double res = norm2(r) / bnorm;
  rep.history.push_back(res);
  for (int it = 1; it <= opt.max_iter; ++it) {
    if (res <= opt.tol) {
      rep.iterations = it - 1;
      rep.relative_residual = res;
      return true;
    }
    const double rho_new = dot(rhat, r);
    if (rho_new == 0.0 || omega == 0.0) break;
    const double beta = (rho_new / rho) * (alpha / omega);
    rho = rho_new;
    for (int i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
    m.apply(p, phat);
    a.multiply(phat, v);
    const double rv = dot(rhat, v);
    if (rv == 0.0) break;
    alpha = rho / rv;
    for (int i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
    if (norm2(s) / bnorm <= opt.tol) {
      axpy(alpha, phat, x);
      // Recompute the true residual rather than trusting the recurrence.
      a.multiply(x, r);
      for (int i = 0; i < n; ++i) r[i] = b[i] - r[i];
      res = norm2(r) / bnorm;
      rep.history.push_back(res);
      rep.iterations = it;
      continue;
    }
    m.apply(s, shat);
    a.multiply(shat, t);
    const double tt = dot(t, t);
    if (tt == 0.0) break;
    omega = dot(t, s) / tt;
    for (int i = 0; i < n; ++i) {
      x[i] += alpha * phat[i] + omega * shat[i];
      r[i] = s[i] - omega * t[i];
    }
    res = norm2(r) / bnorm;
    if (res <= opt.tol) {
      a.multiply(x, r);
      for (int i = 0; i < n; ++i) r[i] = b[i] - r[i];
      res = norm2(r) / bnorm;
    }
    rep.history.push_back(res);
    rep.iterations = it;
  }
  rep.relative_residual = res;
  return res <= opt.tol;
}

using EigenSparse = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

EigenSparse to_eigen(const SparseMatrix& a) {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(a.nnz());
  for (int i = 0; i < a.rows(); ++i)
    for (int k = a.row_offsets()[i]; k < a.row_offsets()[i + 1]; ++k)
      t.emplace_back(i, a.col_indices()[k], a.values()[k]);
  EigenSparse m(a.rows(), a.cols());
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

}  // namespace

std::vector<double> solve_spd(const SparseMatrix& a, std::span<const double> b, bool constant_null_space,
                              const SolverOptions& opt, SolveReport* report, std::span<const double> x0) {
  check_square(a, b.size());
  const int n = a.rows();
  SolveReport rep;
  rep.method = "pcg-jacobi";
  std::vector<double> rhs(b.begin(), b.end());
  const double bnorm_raw = norm2(rhs);
  if (constant_null_space && n > 0) {
    const double compat = std::abs(sum(rhs)) / std::sqrt(static_cast<double>(n));
    if (compat > std::max(opt.tol, 1e-12) * bnorm_raw) {
      char buf[160];
      std::snprintf(buf, sizeof buf,
                    "solve_spd: right-hand side is not orthogonal to constants (component %.3e, |b| = %.3e)", compat,
                    bnorm_raw);
      throw SolverError(buf);
    }
    remove_mean(rhs);
  }
  std::vector<double> x(n, 0.0);
  if (!x0.empty()) {
    if (static_cast<int>(x0.size()) != n) throw ValidationError("solve_spd: initial iterate has wrong length");
    x.assign(x0.begin(), x0.end());
    if (constant_null_space) remove_mean(x);
  }
  const double bnorm = norm2(rhs);
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    rep.history.push_back(0.0);
    if (report) *report = rep;
    return x;
  }
  std::vector<double> dinv = a.diagonal();
  for (double& d : dinv) {
    if (!(d > 0.0)) throw SolverError("solve_spd: non-positive diagonal entry");
    d = 1.0 / d;
  }
  std::vector<double> r(n), z(n), p(n), q(n);
  a.multiply(x, r);
  for (int i = 0; i < n; ++i) r[i] = rhs[i] - r[i];
  if (constant_null_space) remove_mean(r);
  for (int i = 0; i < n; ++i) z[i] = dinv[i] * r[i];
  if (constant_null_space) remove_mean(z);
  p = z;
  double rz = dot(r, z);
  double res = norm2(r) / bnorm;
  rep.history.push_back(res);
  int it = 0;
  while (res > opt.tol && it < opt.max_iter) {
    ++it;
    a.multiply(p, q);
    const double pq = dot(p, q);
    if (!(pq > 0.0)) break;
    const double alpha = rz / pq;
    axpy(alpha, p, x);
    axpy(-alpha, q, r);
    if (constant_null_space) remove_mean(r);
    res = norm2(r) / bnorm;
    if (res <= opt.tol) {
      // Confirm against the true residual.
      a.multiply(x, r);
      for (int i = 0; i < n; ++i) r[i] = rhs[i] - r[i];
      if (constant_null_space) remove_mean(r);
      res = norm2(r) / bnorm;
    }
    rep.history.push_back(res);
    for (int i = 0; i < n; ++i) z[i] = dinv[i] * r[i];
    if (constant_null_space) remove_mean(z);
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  if (constant_null_space) remove_mean(x);
  rep.iterations = it;
  rep.relative_residual = res;
  if (report) *report = rep;
  if (res > opt.tol) throw SolverError(fmt_residual("solve_spd (PCG)", res, it), rep.history);
  return x;
}

struct GeneralSolver::Impl {
  std::unique_ptr<Ilu0> ilu;
  std::string ilu_error;
  mutable std::mutex lu_mutex;
  mutable std::unique_ptr<Eigen::SparseLU<EigenSparse>> lu;
};

GeneralSolver::GeneralSolver(SparseMatrix a, SolverOptions options)
    : a_(std::move(a)), options_(options), impl_(std::make_unique<Impl>()) {
  check_square(a_, a_.rows());
  try {
    impl_->ilu = std::make_unique<Ilu0>(a_);
  } catch (const SolverError& e) {
    impl_->ilu_error = e.what();
  }
}

GeneralSolver::~GeneralSolver() = default;
GeneralSolver::GeneralSolver(GeneralSolver&&) noexcept = default;
GeneralSolver& GeneralSolver::operator=(GeneralSolver&&) noexcept = default;

std::vector<double> GeneralSolver::solve(std::span<const double> b, SolveReport* report,
                                         std::span<const double> x0) const {
  check_square(a_, b.size());
  const int n = a_.rows();
  SolveReport rep;
  std::vector<double> x(n, 0.0);
  if (!x0.empty()) {
    if (static_cast<int>(x0.size()) != n) throw ValidationError("solve_general: initial iterate has wrong length");
    x.assign(x0.begin(), x0.end());
  }
  bool ok = false;
  if (impl_->ilu) {
    rep.method = "bicgstab-ilu0";
    ok = bicgstab(a_, *impl_->ilu, b, x, options_, rep);
  }
  if (!ok && n <= options_.direct_threshold) {
    std::lock_guard lock(impl_->lu_mutex);
    if (!impl_->lu) {
      auto lu = std::make_unique<Eigen::SparseLU<EigenSparse>>();
      EigenSparse m = to_eigen(a_);
      m.makeCompressed();
      lu->compute(m);
      if (lu->info() != Eigen::Success) {
        rep.method = "sparse-lu";
        if (report) *report = rep;
        throw SolverError("solve_general: matrix is singular (sparse LU failed)", rep.history);
      }
      impl_->lu = std::move(lu);
    }
    Eigen::Map<const Eigen::VectorXd> rhs(b.data(), n);
    Eigen::VectorXd sol = impl_->lu->solve(rhs);
    x.assign(sol.data(), sol.data() + n);
    std::vector<double> r = a_.multiply(x);
    for (int i = 0; i < n; ++i) r[i] = b[i] - r[i];
    const double bnorm = norm2(b);
    rep.method = "sparse-lu";
    rep.relative_residual = bnorm > 0.0 ? norm2(r) / bnorm : 0.0;
    rep.history.push_back(rep.relative_residual);
    ok = std::isfinite(rep.relative_residual) && rep.relative_residual <= std::max(options_.tol, 1e-12);
  }
  if (report) *report = rep;
  if (!ok) {
    std::string msg = fmt_residual("solve_general", rep.relative_residual, rep.iterations);
    if (!impl_->ilu_error.empty()) msg += " (" + impl_->ilu_error + ")";
    throw SolverError(msg, rep.history);
  }
  return x;
}

std::vector<double> solve_general(const SparseMatrix& a, std::span<const double> b, const SolverOptions& options,
                                  SolveReport* report, std::span<const double> x0) {
  return GeneralSolver(a, options).solve(b, report, x0);
}

}  // namespace blebsim
