#include "epss/linalg/sparse_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "epss/errors.hpp"

namespace epss {

namespace {

std::string shape(std::size_t r, std::size_t c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

}  // namespace

double norm2(std::span<const double> v) { return std::sqrt(dot(v, v)); }

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) throw DimensionError("axpy: length mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), row_ptr_(rows + 1, 0) {}

SparseMatrix SparseMatrix::from_triplets(std::size_t rows, std::size_t cols,
                                         std::span<const Triplet> entries) {
  for (const auto& t : entries) {
    if (t.row >= rows || t.col >= cols) {
      throw DimensionError("triplet (" + std::to_string(t.row) + ", " + std::to_string(t.col) +
                           ") outside " + shape(rows, cols));
    }
  }
  // Counting sort by row, then sort each row by column and merge duplicates.
  std::vector<std::size_t> count(rows + 1, 0);
  for (const auto& t : entries) ++count[t.row + 1];
  std::partial_sum(count.begin(), count.end(), count.begin());
  std::vector<std::size_t> cols_tmp(entries.size());
  std::vector<double> vals_tmp(entries.size());
  std::vector<std::size_t> next(count.begin(), count.end() - 1);
  for (const auto& t : entries) {
    const std::size_t k = next[t.row]++;
    cols_tmp[k] = t.col;
    vals_tmp[k] = t.value;
  }

  SparseMatrix out(rows, cols);
  out.col_idx_.reserve(entries.size());
  out.values_.reserve(entries.size());
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < rows; ++i) {
    const std::size_t b = count[i], e = count[i + 1];
    order.resize(e - b);
    std::iota(order.begin(), order.end(), b);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return cols_tmp[x] < cols_tmp[y]; });
    for (std::size_t k = 0; k < order.size();) {
      const std::size_t c = cols_tmp[order[k]];
      double v = 0.0;
      for (; k < order.size() && cols_tmp[order[k]] == c; ++k) v += vals_tmp[order[k]];
      if (v != 0.0) {
        out.col_idx_.push_back(c);
        out.values_.push_back(v);
      }
    }
    out.row_ptr_[i + 1] = out.values_.size();
  }
  return out;
}

SparseMatrix SparseMatrix::from_csr(std::size_t rows, std::size_t cols,
                                    std::vector<std::size_t> row_ptr,
                                    std::vector<std::size_t> col_idx,
                                    std::vector<double> values) {
  if (row_ptr.size() != rows + 1 || row_ptr.front() != 0 || row_ptr.back() != col_idx.size() ||
      col_idx.size() != values.size()) {
    throw DimensionError("from_csr: inconsistent array lengths");
  }
  SparseMatrix out(rows, cols);
  out.col_idx_.reserve(col_idx.size());
  out.values_.reserve(values.size());
  for (std::size_t i = 0; i < rows; ++i) {
    if (row_ptr[i + 1] < row_ptr[i]) throw DimensionError("from_csr: row pointers not monotone");
    for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
      if (col_idx[k] >= cols) throw DimensionError("from_csr: column index out of range");
      if (k > row_ptr[i] && col_idx[k] <= col_idx[k - 1]) {
        throw DimensionError("from_csr: column indices not strictly increasing in row " +
                             std::to_string(i));
      }
      if (values[k] != 0.0) {
        out.col_idx_.push_back(col_idx[k]);
        out.values_.push_back(values[k]);
      }
    }
    out.row_ptr_[i + 1] = out.values_.size();
  }
  return out;
}

SparseMatrix SparseMatrix::identity(std::size_t n, double scale) {
  std::vector<double> d(n, scale);
  return diagonal(d);
}

SparseMatrix SparseMatrix::diagonal(std::span<const double> d) {
  const std::size_t n = d.size();
  SparseMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (d[i] != 0.0) {
      out.col_idx_.push_back(i);
      out.values_.push_back(d[i]);
    }
    out.row_ptr_[i + 1] = out.values_.size();
  }
  return out;
}

SparseMatrix SparseMatrix::from_dense(const DenseMatrix& a) {
  SparseMatrix out(static_cast<std::size_t>(a.rows()), static_cast<std::size_t>(a.cols()));
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (a(i, j) != 0.0) {
        out.col_idx_.push_back(static_cast<std::size_t>(j));
        out.values_.push_back(a(i, j));
      }
    }
    out.row_ptr_[static_cast<std::size_t>(i) + 1] = out.values_.size();
  }
  return out;
}

double SparseMatrix::coeff(std::size_t i, std::size_t j) const {
  if (i >= rows_ || j >= cols_) throw DimensionError("coeff: index out of range");
  const auto cols = row_cols(i);
  const auto it = std::lower_bound(cols.begin(), cols.end(), j);
  if (it == cols.end() || *it != j) return 0.0;
  return values_[row_ptr_[i] + static_cast<std::size_t>(it - cols.begin())];
}

Vector SparseMatrix::diagonal() const {
  Vector d(std::min(rows_, cols_), 0.0);
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = coeff(i, i);
  return d;
}

double SparseMatrix::max_abs() const noexcept {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  if (x.size() != cols_ || y.size() != rows_) {
    throw DimensionError("spmv: matrix " + shape(rows_, cols_) + " with x of length " +
                         std::to_string(x.size()) + ", y of length " + std::to_string(y.size()));
  }
  for (std::size_t i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += values_[k] * x[col_idx_[k]];
    y[i] = s;
  }
}

void SparseMatrix::multiply_add(double s, std::span<const double> x, std::span<double> y) const {
  if (x.size() != cols_ || y.size() != rows_) throw DimensionError("spmv: length mismatch");
  for (std::size_t i = 0; i < rows_; ++i) {
    double acc = 0.0;
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) acc += values_[k] * x[col_idx_[k]];
    y[i] += s * acc;
  }
}

void SparseMatrix::multiply_transpose(std::span<const double> x, std::span<double> y) const {
  if (x.size() != rows_ || y.size() != cols_) throw DimensionError("spmv^T: length mismatch");
  std::fill(y.begin(), y.end(), 0.0);
  for (std::size_t i = 0; i < rows_; ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) y[col_idx_[k]] += values_[k] * xi;
  }
}

DenseMatrix SparseMatrix::to_dense() const {
  DenseMatrix d = DenseMatrix::Zero(static_cast<Eigen::Index>(rows_),
                                    static_cast<Eigen::Index>(cols_));
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(col_idx_[k])) = values_[k];
    }
  }
  return d;
}

Vector spmv(const SparseMatrix& a, std::span<const double> x) {
  Vector y(a.rows());
  a.multiply(x, y);
  return y;
}

SparseMatrix transpose(const SparseMatrix& a) {
  std::vector<std::size_t> ptr(a.cols() + 1, 0);
  for (std::size_t c : a.col_idx()) ++ptr[c + 1];
  std::partial_sum(ptr.begin(), ptr.end(), ptr.begin());
  std::vector<std::size_t> idx(a.nnz());
  std::vector<double> val(a.nnz());
  std::vector<std::size_t> next(ptr.begin(), ptr.end() - 1);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto cols = a.row_cols(i);
    const auto vals = a.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const std::size_t dst = next[cols[k]]++;
      idx[dst] = i;
      val[dst] = vals[k];
    }
  }
  return SparseMatrix::from_csr(a.cols(), a.rows(), std::move(ptr), std::move(idx),
                                std::move(val));
}

SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b, double alpha, double beta) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("add: " + shape(a.rows(), a.cols()) + " vs " + shape(b.rows(), b.cols()));
  }
  std::vector<std::size_t> ptr(a.rows() + 1, 0);
  std::vector<std::size_t> idx;
  std::vector<double> val;
  idx.reserve(a.nnz() + b.nnz());
  val.reserve(a.nnz() + b.nnz());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto ac = a.row_cols(i), bc = b.row_cols(i);
    const auto av = a.row_values(i), bv = b.row_values(i);
    std::size_t p = 0, q = 0;
    while (p < ac.size() || q < bc.size()) {
      double v;
      std::size_t c;
      if (q == bc.size() || (p < ac.size() && ac[p] < bc[q])) {
        c = ac[p];
        v = alpha * av[p++];
      } else if (p == ac.size() || bc[q] < ac[p]) {
        c = bc[q];
        v = beta * bv[q++];
      } else {
        c = ac[p];
        v = alpha * av[p++] + beta * bv[q++];
      }
      if (v != 0.0) {
        idx.push_back(c);
        val.push_back(v);
      }
    }
    ptr[i + 1] = val.size();
  }
  return SparseMatrix::from_csr(a.rows(), a.cols(), std::move(ptr), std::move(idx),
                                std::move(val));
}

SparseMatrix scaled(const SparseMatrix& a, double s) {
  std::vector<double> val(a.values().begin(), a.values().end());
  for (double& v : val) v *= s;
  return SparseMatrix::from_csr(a.rows(), a.cols(),
                                {a.row_ptr().begin(), a.row_ptr().end()},
                                {a.col_idx().begin(), a.col_idx().end()}, std::move(val));
}

SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("multiply: " + shape(a.rows(), a.cols()) + " * " +
                         shape(b.rows(), b.cols()));
  }
  // Gustavson's row-by-row product with a dense accumulator.
  std::vector<std::size_t> ptr(a.rows() + 1, 0);
  std::vector<std::size_t> idx;
  std::vector<double> val;
  std::vector<double> acc(b.cols(), 0.0);
  std::vector<std::size_t> mark(b.cols(), static_cast<std::size_t>(-1));
  std::vector<std::size_t> pattern;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    pattern.clear();
    const auto ac = a.row_cols(i);
    const auto av = a.row_values(i);
    for (std::size_t p = 0; p < ac.size(); ++p) {
      const auto bc = b.row_cols(ac[p]);
      const auto bv = b.row_values(ac[p]);
      for (std::size_t q = 0; q < bc.size(); ++q) {
        if (mark[bc[q]] != i) {
          mark[bc[q]] = i;
          acc[bc[q]] = 0.0;
          pattern.push_back(bc[q]);
        }
        acc[bc[q]] += av[p] * bv[q];
      }
    }
    std::sort(pattern.begin(), pattern.end());
    for (std::size_t c : pattern) {
      if (acc[c] != 0.0) {
        idx.push_back(c);
        val.push_back(acc[c]);
      }
    }
    ptr[i + 1] = val.size();
  }
  return SparseMatrix::from_csr(a.rows(), b.cols(), std::move(ptr), std::move(idx),
                                std::move(val));
}

SparseMatrix scale_rows(const SparseMatrix& a, std::span<const double> d) {
  if (d.size() != a.rows()) throw DimensionError("scale_rows: length mismatch");
  std::vector<double> val(a.values().begin(), a.values().end());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k) val[k] *= d[i];
  }
  return SparseMatrix::from_csr(a.rows(), a.cols(),
                                {a.row_ptr().begin(), a.row_ptr().end()},
                                {a.col_idx().begin(), a.col_idx().end()}, std::move(val));
}

SparseMatrix symmetric_part(const SparseMatrix& a) {
  if (!a.is_square()) throw DimensionError("symmetric_part: matrix not square");
  return add(a, transpose(a), 0.5, 0.5);
}

SparseMatrix skew_part(const SparseMatrix& a) {
  if (!a.is_square()) throw DimensionError("skew_part: matrix not square");
  return add(a, transpose(a), 0.5, -0.5);
}

SparseMatrix triangle(const SparseMatrix& a, Triangle which, bool with_diagonal) {
  std::vector<Triplet> t;
  t.reserve(a.nnz());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto cols = a.row_cols(i);
    const auto vals = a.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const std::size_t j = cols[k];
      const bool keep = (j == i) ? with_diagonal : (which == Triangle::lower ? j < i : j > i);
      if (keep) t.push_back({i, j, vals[k]});
    }
  }
  return SparseMatrix::from_triplets(a.rows(), a.cols(), t);
}

bool is_triangular(const SparseMatrix& a, Triangle which) {
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j : a.row_cols(i)) {
      if (which == Triangle::lower ? j > i : j < i) return false;
    }
  }
  return true;
}

double frobenius_norm(const SparseMatrix& a) { return norm2(a.values()); }

double trace(const SparseMatrix& a) {
  if (!a.is_square()) throw DimensionError("trace of non-square " + shape(a.rows(), a.cols()));
  double s = 0.0;
  for (double d : a.diagonal()) s += d;
  return s;
}

SparseMatrix block_2x2(const SparseMatrix& a11, const SparseMatrix& a12, const SparseMatrix& a21,
                       const SparseMatrix& a22) {
  auto pick = [](std::size_t x, std::size_t y) { return x ? x : y; };
  const std::size_t r1 = pick(a11.rows(), a12.rows());
  const std::size_t r2 = pick(a21.rows(), a22.rows());
  const std::size_t c1 = pick(a11.cols(), a21.cols());
  const std::size_t c2 = pick(a12.cols(), a22.cols());
  auto check = [](const SparseMatrix& b, std::size_t r, std::size_t c) {
    if ((b.rows() || b.cols()) && (b.rows() != r || b.cols() != c)) {
      throw DimensionError("block_2x2: block " + shape(b.rows(), b.cols()) + " where " +
                           shape(r, c) + " expected");
    }
  };
  check(a11, r1, c1);
  check(a12, r1, c2);
  check(a21, r2, c1);
  check(a22, r2, c2);

  std::vector<std::size_t> ptr(r1 + r2 + 1, 0);
  std::vector<std::size_t> idx;
  std::vector<double> val;
  idx.reserve(a11.nnz() + a12.nnz() + a21.nnz() + a22.nnz());
  val.reserve(idx.capacity());
  auto append = [&](const SparseMatrix& b, std::size_t i, std::size_t offset) {
    if (b.rows() == 0) return;
    const auto cols = b.row_cols(i);
    const auto vals = b.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      idx.push_back(cols[k] + offset);
      val.push_back(vals[k]);
    }
  };
  for (std::size_t i = 0; i < r1; ++i) {
    append(a11, i, 0);
    append(a12, i, c1);
    ptr[i + 1] = val.size();
  }
  for (std::size_t i = 0; i < r2; ++i) {
    append(a21, i, 0);
    append(a22, i, c1);
    ptr[r1 + i + 1] = val.size();
  }
  return SparseMatrix::from_csr(r1 + r2, c1 + c2, std::move(ptr), std::move(idx), std::move(val));
}

SparseMatrix sub_block(const SparseMatrix& a, std::size_t r0, std::size_t nr, std::size_t c0,
                       std::size_t nc) {
  if (r0 + nr > a.rows() || c0 + nc > a.cols()) throw DimensionError("sub_block out of range");
  std::vector<std::size_t> ptr(nr + 1, 0);
  std::vector<std::size_t> idx;
  std::vector<double> val;
  for (std::size_t i = 0; i < nr; ++i) {
    const auto cols = a.row_cols(r0 + i);
    const auto vals = a.row_values(r0 + i);
    auto first = std::lower_bound(cols.begin(), cols.end(), c0);
    for (auto it = first; it != cols.end() && *it < c0 + nc; ++it) {
      idx.push_back(*it - c0);
      val.push_back(vals[static_cast<std::size_t>(it - cols.begin())]);
    }
    ptr[i + 1] = val.size();
  }
  return SparseMatrix::from_csr(nr, nc, std::move(ptr), std::move(idx), std::move(val));
}

}  // namespace epss
