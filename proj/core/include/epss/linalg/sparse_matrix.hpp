#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "epss/linalg/types.hpp"

namespace epss {

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

/// Compressed sparse row matrix over doubles.
///
/// Invariants: column indices strictly increasing inside each row, row
/// pointers monotone with `row_ptr().back() == nnz()`, and no explicitly
/// stored zeros. Every factory enforces them, so instances are always valid.
class SparseMatrix {
 public:
  SparseMatrix() : row_ptr_(1, 0) {}
  /// All-zero matrix of the given shape.
  SparseMatrix(std::size_t rows, std::size_t cols);

  /// Duplicates are summed; entries that end up exactly zero are dropped.
  static SparseMatrix from_triplets(std::size_t rows, std::size_t cols,
                                    std::span<const Triplet> entries);
  /// Takes CSR arrays, validates them and prunes exact zeros.
  static SparseMatrix from_csr(std::size_t rows, std::size_t cols,
                               std::vector<std::size_t> row_ptr,
                               std::vector<std::size_t> col_idx, std::vector<double> values);
  static SparseMatrix identity(std::size_t n, double scale = 1.0);
  static SparseMatrix diagonal(std::span<const double> d);
  static SparseMatrix from_dense(const DenseMatrix& a);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t nnz() const noexcept { return values_.size(); }
  bool is_square() const noexcept { return rows_ == cols_; }
  bool empty() const noexcept { return values_.empty(); }

  std::span<const std::size_t> row_ptr() const noexcept { return row_ptr_; }
  std::span<const std::size_t> col_idx() const noexcept { return col_idx_; }
  std::span<const double> values() const noexcept { return values_; }

  std::span<const std::size_t> row_cols(std::size_t i) const {
    return std::span(col_idx_).subspan(row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]);
  }
  std::span<const double> row_values(std::size_t i) const {
    return std::span(values_).subspan(row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]);
  }

  /// Entry (i, j), zero when not stored. O(log row length).
  double coeff(std::size_t i, std::size_t j) const;
  Vector diagonal() const;
  double max_abs() const noexcept;

  /// y = A x. Throws DimensionError on mismatch.
  void multiply(std::span<const double> x, std::span<double> y) const;
  /// y += s * A x
  void multiply_add(double s, std::span<const double> x, std::span<double> y) const;
  /// y = A^T x
  void multiply_transpose(std::span<const double> x, std::span<double> y) const;

  DenseMatrix to_dense() const;

  friend bool operator==(const SparseMatrix&, const SparseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_ptr_;
  std::vector<std::size_t> col_idx_;
  std::vector<double> values_;
};

Vector spmv(const SparseMatrix& a, std::span<const double> x);
SparseMatrix transpose(const SparseMatrix& a);
/// alpha * A + beta * B
SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b, double alpha = 1.0,
                 double beta = 1.0);
SparseMatrix scaled(const SparseMatrix& a, double s);
/// Sparse product A * B.
SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b);
/// D * A with D = diag(d).
SparseMatrix scale_rows(const SparseMatrix& a, std::span<const double> d);

/// (A + A^T) / 2
SparseMatrix symmetric_part(const SparseMatrix& a);
/// (A - A^T) / 2
SparseMatrix skew_part(const SparseMatrix& a);

enum class Triangle { lower, upper };
/// Entries with j < i (lower) or j > i (upper), optionally keeping the diagonal.
SparseMatrix triangle(const SparseMatrix& a, Triangle which, bool with_diagonal);
bool is_triangular(const SparseMatrix& a, Triangle which);

double frobenius_norm(const SparseMatrix& a);
double trace(const SparseMatrix& a);

/// [[a11, a12], [a21, a22]]; an empty (0x0) block means zero of the implied shape.
SparseMatrix block_2x2(const SparseMatrix& a11, const SparseMatrix& a12, const SparseMatrix& a21,
                       const SparseMatrix& a22);
/// Rows [r0, r0+nr) and columns [c0, c0+nc).
SparseMatrix sub_block(const SparseMatrix& a, std::size_t r0, std::size_t nr, std::size_t c0,
                       std::size_t nc);

}  // namespace epss
