#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "blebsim/sparse.hpp"

namespace blebsim {

struct SolverOptions {
  double tol = 1e-10;  // relative residual ||b - Ax|| / ||b||
  int max_iter = 5000;
  /// solve_general falls back to sparse LU at or below this size.
  int direct_threshold = 20000;
};

struct SolveReport {
  std::string method;
  int iterations = 0;
  double relative_residual = 0.0;
  std::vector<double> history;
};

/// Jacobi-preconditioned CG for symmetric positive (semi)definite systems.
/// With `constant_null_space`, b must be orthogonal to constants (else a
/// SolverError), iterates are kept zero-mean and the result has zero mean.
std::vector<double> solve_spd(const SparseMatrix& a, std::span<const double> b, bool constant_null_space,
                              const SolverOptions& options = {}, SolveReport* report = nullptr,
                              std::span<const double> x0 = {});

/// BiCGSTAB with ILU(0) preconditioning; small systems that fail to converge
/// are retried with a sparse LU factorisation.
std::vector<double> solve_general(const SparseMatrix& a, std::span<const double> b, const SolverOptions& options = {},
                                  SolveReport* report = nullptr, std::span<const double> x0 = {});

/// Reusable nonsymmetric solver: the ILU(0) factors (and the LU fallback,
/// once needed) are computed once and shared by every solve.
class GeneralSolver {
 public:
  GeneralSolver(SparseMatrix a, SolverOptions options);
  ~GeneralSolver();
  GeneralSolver(GeneralSolver&&) noexcept;
  GeneralSolver& operator=(GeneralSolver&&) noexcept;

  std::vector<double> solve(std::span<const double> b, SolveReport* report = nullptr,
                            std::span<const double> x0 = {}) const;
  const SparseMatrix& matrix() const { return a_; }

 private:
  struct Impl;
  SparseMatrix a_;
  SolverOptions options_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace blebsim
