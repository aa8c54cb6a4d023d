#pragma once

#include <filesystem>
#include <span>
#include <vector>

namespace blebsim {

struct Triplet {
  int row = 0;
  int col = 0;
  double value = 0.0;
};

/// Compressed sparse row matrix. Column indices are strictly increasing
/// within each row and no stored value is exactly zero.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(int rows, int cols);

  /// Duplicates are summed in a fixed order (stable sort by row, column),
  /// so the result is bitwise independent of how callers interleave rows.
  static SparseMatrix from_triplets(int rows, int cols, std::vector<Triplet> triplets);
  static SparseMatrix identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int nnz() const { return static_cast<int>(values_.size()); }
  const std::vector<int>& row_offsets() const { return offsets_; }
  const std::vector<int>& col_indices() const { return cols_idx_; }
  const std::vector<double>& values() const { return values_; }

  double at(int i, int j) const;
  void multiply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> multiply(std::span<const double> x) const;
  std::vector<double> multiply_transpose(std::span<const double> x) const;
  SparseMatrix transpose() const;
  std::vector<double> diagonal() const;
  std::vector<double> row_sums() const;
  std::vector<double> column_sums() const;
  double max_abs() const;
  bool is_symmetric(double tol) const;

  /// alpha * a + beta * b; shapes must match.
  static SparseMatrix combine(double alpha, const SparseMatrix& a, double beta, const SparseMatrix& b);

  /// Matrix Market coordinate format (general, real).
  void write_matrix_market(const std::filesystem::path& path) const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<int> offsets_{0};
  std::vector<int> cols_idx_;
  std::vector<double> values_;
};

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double norm_inf(std::span<const double> a);
/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
double sum(std::span<const double> a);

}  // namespace blebsim
