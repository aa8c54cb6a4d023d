#include "blebsim/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "blebsim/error.hpp"

namespace blebsim {

SparseMatrix::SparseMatrix(int rows, int cols) : rows_(rows), cols_(cols), offsets_(rows + 1, 0) {
  if (rows < 0 || cols < 0) throw ValidationError("sparse: negative dimensions");
}

SparseMatrix SparseMatrix::from_triplets(int rows, int cols, std::vector<Triplet> triplets) {
  SparseMatrix m(rows, cols);
  for (const auto& t : triplets)
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
      throw ValidationError("sparse: triplet index out of range");
  std::stable_sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row < b.row || (a.row == b.row && a.col < b.col);
  });
  std::vector<int> count(rows, 0);
  for (std::size_t k = 0; k < triplets.size();) {
    const int r = triplets[k].row, c = triplets[k].col;
    double v = 0.0;
    for (; k < triplets.size() && triplets[k].row == r && triplets[k].col == c; ++k) v += triplets[k].value;
    if (v == 0.0) continue;
    m.cols_idx_.push_back(c);
    m.values_.push_back(v);
    ++count[r];
  }
  for (int i = 0; i < rows; ++i) m.offsets_[i + 1] = m.offsets_[i] + count[i];
  return m;
}

SparseMatrix SparseMatrix::identity(int n) {
  std::vector<Triplet> t;
  t.reserve(n);
  for (int i = 0; i < n; ++i) t.push_back({i, i, 1.0});
  return from_triplets(n, n, std::move(t));
}

double SparseMatrix::at(int i, int j) const {
  const auto begin = cols_idx_.begin() + offsets_[i], end = cols_idx_.begin() + offsets_[i + 1];
  auto it = std::lower_bound(begin, end, j);
  return (it != end && *it == j) ? values_[it - cols_idx_.begin()] : 0.0;
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  if (static_cast<int>(x.size()) != cols_ || static_cast<int>(y.size()) != rows_)
    throw ValidationError("sparse: dimension mismatch in multiply");
  for (int i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (int k = offsets_[i]; k < offsets_[i + 1]; ++k) s += values_[k] * x[cols_idx_[k]];
    y[i] = s;
  }
}

std::vector<double> SparseMatrix::multiply(std::span<const double> x) const {
  std::vector<double> y(rows_);
  multiply(x, y);
  return y;
}

std::vector<double> SparseMatrix::multiply_transpose(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != rows_) throw ValidationError("sparse: dimension mismatch in multiply_transpose");
  std::vector<double> y(cols_, 0.0);
  for (int i = 0; i < rows_; ++i)
    for (int k = offsets_[i]; k < offsets_[i + 1]; ++k) y[cols_idx_[k]] += values_[k] * x[i];
  return y;
}

SparseMatrix SparseMatrix::transpose() const {
  std::vector<Triplet> t;
  t.reserve(values_.size());
  for (int i = 0; i < rows_; ++i)
    for (int k = offsets_[i]; k < offsets_[i + 1]; ++k) t.push_back({cols_idx_[k], i, values_[k]});
  return from_triplets(cols_, rows_, std::move(t));
}

std::vector<double> SparseMatrix::diagonal() const {
  std::vector<double> d(std::min(rows_, cols_));
  for (int i = 0; i < static_cast<int>(d.size()); ++i) d[i] = at(i, i);
  return d;
}

std::vector<double> SparseMatrix::row_sums() const {
  std::vector<double> s(rows_, 0.0);
  for (int i = 0; i < rows_; ++i)
    for (int k = offsets_[i]; k < offsets_[i + 1]; ++k) s[i] += values_[k];
  return s;
}

std::vector<double> SparseMatrix::column_sums() const {
  std::vector<double> s(cols_, 0.0);
  for (int i = 0; i < rows_; ++i)
    for (int k = offsets_[i]; k < offsets_[i + 1]; ++k) s[cols_idx_[k]] += values_[k];
  return s;
}

double SparseMatrix::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

bool SparseMatrix::is_symmetric(double tol) const {
  if (rows_ != cols_) return false;
  const double scale = std::max(max_abs(), 1e-300);
  for (int i = 0; i < rows_; ++i)
    for (int k = offsets_[i]; k < offsets_[i + 1]; ++k)
      if (std::abs(values_[k] - at(cols_idx_[k], i)) > tol * scale) return false;
  return true;
}

SparseMatrix SparseMatrix::combine(double alpha, const SparseMatrix& a, double beta, const SparseMatrix& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw ValidationError("sparse: dimension mismatch in combine");
  std::vector<Triplet> t;
  t.reserve(a.values_.size() + b.values_.size());
  for (int i = 0; i < a.rows_; ++i) {
    for (int k = a.offsets_[i]; k < a.offsets_[i + 1]; ++k) t.push_back({i, a.cols_idx_[k], alpha * a.values_[k]});
    for (int k = b.offsets_[i]; k < b.offsets_[i + 1]; ++k) t.push_back({i, b.cols_idx_[k], beta * b.values_[k]});
  }
  return from_triplets(a.rows_, a.cols_, std::move(t));
}

void SparseMatrix::write_matrix_market(const std::filesystem::path& path) const {
  std::FILE* f = std::fopen(path.string().c_str(), "w");
  if (!f) throw IoError("cannot write " + path.string());
  std::fprintf(f, "%%%%MatrixMarket matrix coordinate real general\n%d %d %d\n", rows_, cols_, nnz());
  for (int i = 0; i < rows_; ++i)
    for (int k = offsets_[i]; k < offsets_[i + 1]; ++k)
      std::fprintf(f, "%d %d %.17g\n", i + 1, cols_idx_[k] + 1, values_[k]);
  if (std::fclose(f) != 0) throw IoError("failed writing " + path.string());
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double norm_inf(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

double sum(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += v;
  return s;
}

}  // namespace blebsim
