#include "epss/linalg/lu.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <variant>

extern "C" {
#include <cs.h>
}

#include "epss/errors.hpp"

namespace epss {

namespace {

constexpr std::size_t kNoPivot = std::numeric_limits<std::size_t>::max();

struct DenseFactors {
  std::size_t n = 0;
  std::vector<double> lu;          // row-major, unit L below the diagonal
  std::vector<std::size_t> perm;   // row i of PA is row perm[i] of A
};

// Returns the failing elimination step, or kNoPivot on success.
std::size_t dense_factor(DenseFactors& f, double threshold) {
  const std::size_t n = f.n;
  auto at = [&](std::size_t i, std::size_t j) -> double& { return f.lu[i * n + j]; };
  f.perm.resize(n);
  for (std::size_t i = 0; i < n; ++i) f.perm[i] = i;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    double best = std::abs(at(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(at(i, k)) > best) {
        best = std::abs(at(i, k));
        p = i;
      }
    }
    if (best <= threshold) return k;
    if (p != k) {
      std::swap_ranges(f.lu.begin() + static_cast<std::ptrdiff_t>(k * n),
                       f.lu.begin() + static_cast<std::ptrdiff_t>((k + 1) * n),
                       f.lu.begin() + static_cast<std::ptrdiff_t>(p * n));
      std::swap(f.perm[k], f.perm[p]);
    }
    const double pivot = at(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double l = at(i, k) / pivot;
      at(i, k) = l;
      if (l == 0.0) continue;
      double* ri = &at(i, 0);
      const double* rk = &at(k, 0);
      for (std::size_t j = k + 1; j < n; ++j) ri[j] -= l * rk[j];
    }
  }
  return kNoPivot;
}

struct CsDeleter {
  void operator()(cs_di* a) const { cs_di_spfree(a); }
  void operator()(cs_dis* s) const { cs_di_sfree(s); }
  void operator()(cs_din* n) const { cs_di_nfree(n); }
};

struct SparseFactors {
  std::size_t n = 0;
  std::unique_ptr<cs_dis, CsDeleter> symbolic;
  std::unique_ptr<cs_din, CsDeleter> numeric;
};

// Partial pivoting threshold: keep the AMD diagonal when it is within 10x of
// the column maximum.
constexpr double kSparsePivotThreshold = 0.1;

}  // namespace

class LuFactors::Impl {
 public:
  std::variant<DenseFactors, SparseFactors> data;

  std::size_t order() const {
    return std::visit([](const auto& f) { return f.n; }, data);
  }

  void solve(std::span<double> b) const {
    if (b.size() != order()) {
      throw DimensionError("LU solve: rhs length " + std::to_string(b.size()) + ", order " +
                           std::to_string(order()));
    }
    if (const auto* d = std::get_if<DenseFactors>(&data)) {
      const std::size_t n = d->n;
      std::vector<double> y(n);
      for (std::size_t i = 0; i < n; ++i) y[i] = b[d->perm[i]];
      for (std::size_t i = 0; i < n; ++i) {
        const double* row = &d->lu[i * n];
        double s = y[i];
        for (std::size_t j = 0; j < i; ++j) s -= row[j] * y[j];
        y[i] = s;
      }
      for (std::size_t i = n; i-- > 0;) {
        const double* row = &d->lu[i * n];
        double s = y[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= row[j] * y[j];
        y[i] = s / row[i];
      }
      std::copy(y.begin(), y.end(), b.begin());
      return;
    }
    const auto& s = std::get<SparseFactors>(data);
    const int n = static_cast<int>(s.n);
    std::vector<double> x(s.n);
    cs_di_ipvec(s.numeric->pinv, b.data(), x.data(), n);
    cs_di_lsolve(s.numeric->L, x.data());
    cs_di_usolve(s.numeric->U, x.data());
    cs_di_ipvec(s.symbolic->q, x.data(), b.data(), n);
  }
};

namespace {

LuFactors::Impl dense_impl(const DenseMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("lu_factor: matrix not square");
  DenseFactors f;
  f.n = static_cast<std::size_t>(a.rows());
  f.lu.assign(a.data(), a.data() + a.size());
  const double threshold = kSingularPivotTol * (f.n ? a.cwiseAbs().maxCoeff() : 0.0);
  if (const std::size_t k = dense_factor(f, threshold); k != kNoPivot) {
    throw SingularMatrixError("lu_factor: zero pivot at column " + std::to_string(k), k);
  }
  LuFactors::Impl impl;
  impl.data = std::move(f);
  return impl;
}

LuFactors::Impl sparse_impl(const SparseMatrix& a) {
  const std::size_t n = a.rows();
  // The CSR arrays of A^T are the CSC arrays of A.
  const SparseMatrix at = transpose(a);
  std::vector<int> p(at.row_ptr().begin(), at.row_ptr().end());
  std::vector<int> i(at.col_idx().begin(), at.col_idx().end());
  std::vector<double> x(at.values().begin(), at.values().end());
  cs_di view{};
  view.nzmax = static_cast<int>(x.size());
  view.m = view.n = static_cast<int>(n);
  view.p = p.data();
  view.i = i.data();
  view.x = x.data();
  view.nz = -1;

  SparseFactors f;
  f.n = n;
  f.symbolic.reset(cs_di_sqr(1, &view, 0));
  if (!f.symbolic) throw std::bad_alloc();
  f.numeric.reset(cs_di_lu(&view, f.symbolic.get(), kSparsePivotThreshold));
  if (!f.numeric) {
    // No admissible pivot in some column. Retry densely when affordable: it
    // either succeeds or names the failing column.
    if (n <= kDenseLuLimit) return dense_impl(a.to_dense());
    throw SingularMatrixError("lu_factor: structurally or numerically singular sparse matrix",
                              kNoPivot);
  }
  const double threshold = kSingularPivotTol * a.max_abs();
  const cs_di* u = f.numeric->U;
  for (int k = 0; k < u->n; ++k) {
    // cs_lu stores the pivot as the last entry of each U column.
    const double pivot = u->x[u->p[k + 1] - 1];
    if (std::abs(pivot) <= threshold) {
      const auto col = static_cast<std::size_t>(f.symbolic->q ? f.symbolic->q[k] : k);
      throw SingularMatrixError("lu_factor: zero pivot at column " + std::to_string(col), col);
    }
  }
  LuFactors::Impl impl;
  impl.data = std::move(f);
  return impl;
}

}  // namespace

LuFactors LuFactors::factor(const DenseMatrix& a) {
  return LuFactors(std::make_shared<const Impl>(dense_impl(a)));
}

LuFactors LuFactors::factor(const SparseMatrix& a, LuBackend backend) {
  if (!a.is_square()) throw DimensionError("lu_factor: matrix not square");
  if (backend == LuBackend::automatic) {
    backend = a.rows() <= kDenseLuCutoff ? LuBackend::dense : LuBackend::sparse;
  }
  if (backend == LuBackend::dense) {
    if (a.rows() > kDenseLuLimit) {
      throw DimensionError("lu_factor: dense path limited to order " +
                           std::to_string(kDenseLuLimit));
    }
    return factor(a.to_dense());
  }
  return LuFactors(std::make_shared<const Impl>(sparse_impl(a)));
}

std::size_t LuFactors::order() const noexcept { return impl_->order(); }

bool LuFactors::is_sparse() const noexcept {
  return std::holds_alternative<SparseFactors>(impl_->data);
}

void LuFactors::solve_in_place(std::span<double> rhs) const { impl_->solve(rhs); }

Vector LuFactors::solve(std::span<const double> rhs) const {
  Vector x(rhs.begin(), rhs.end());
  impl_->solve(x);
  return x;
}

DenseMatrix LuFactors::solve(const DenseMatrix& rhs) const {
  if (static_cast<std::size_t>(rhs.rows()) != order()) {
    throw DimensionError("LU solve: rhs block has wrong row count");
  }
  DenseMatrix out(rhs.rows(), rhs.cols());
  Vector col(order());
  for (Eigen::Index j = 0; j < rhs.cols(); ++j) {
    for (Eigen::Index i = 0; i < rhs.rows(); ++i) col[static_cast<std::size_t>(i)] = rhs(i, j);
    impl_->solve(col);
    for (Eigen::Index i = 0; i < rhs.rows(); ++i) out(i, j) = col[static_cast<std::size_t>(i)];
  }
  return out;
}

void triangular_solve_in_place(const SparseMatrix& t, std::span<double> r, bool lower) {
  const std::size_t n = t.rows();
  if (!t.is_square() || r.size() != n) throw DimensionError("triangular_solve: shape mismatch");
  auto solve_row = [&](std::size_t i) {
    const auto cols = t.row_cols(i);
    const auto vals = t.row_values(i);
    double s = r[i];
    double diag = 0.0;
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const std::size_t j = cols[k];
      if (j == i) {
        diag = vals[k];
      } else if (lower ? j < i : j > i) {
        s -= vals[k] * r[j];
      } else {
        throw std::invalid_argument("triangular_solve: entry (" + std::to_string(i) + ", " +
                                    std::to_string(j) + ") on the wrong side of the diagonal");
      }
    }
    if (diag == 0.0) {
      throw SingularMatrixError("triangular_solve: zero diagonal in row " + std::to_string(i), i);
    }
    r[i] = s / diag;
  };
  if (lower) {
    for (std::size_t i = 0; i < n; ++i) solve_row(i);
  } else {
    for (std::size_t i = n; i-- > 0;) solve_row(i);
  }
}

Vector triangular_solve(const SparseMatrix& t, std::span<const double> r, bool lower) {
  Vector z(r.begin(), r.end());
  triangular_solve_in_place(t, z, lower);
  return z;
}

SparseMatrix lower_triangular_solve(const SparseMatrix& t, const SparseMatrix& b) {
  const std::size_t n = t.rows();
  if (!t.is_square() || b.rows() != n) throw DimensionError("lower_triangular_solve: shape");
  std::vector<std::size_t> ptr(n + 1, 0);
  std::vector<std::size_t> idx;
  std::vector<double> val;
  std::vector<double> acc(b.cols(), 0.0);
  std::vector<std::size_t> mark(b.cols(), kNoPivot);
  std::vector<std::size_t> pattern;
  auto touch = [&](std::size_t c, std::size_t row) {
    if (mark[c] != row) {
      mark[c] = row;
      acc[c] = 0.0;
      pattern.push_back(c);
    }
  };
  for (std::size_t i = 0; i < n; ++i) {
    pattern.clear();
    const auto bc = b.row_cols(i);
    const auto bv = b.row_values(i);
    for (std::size_t k = 0; k < bc.size(); ++k) {
      touch(bc[k], i);
      acc[bc[k]] += bv[k];
    }
    double diag = 0.0;
    const auto tc = t.row_cols(i);
    const auto tv = t.row_values(i);
    for (std::size_t k = 0; k < tc.size(); ++k) {
      const std::size_t j = tc[k];
      if (j == i) {
        diag = tv[k];
        continue;
      }
      if (j > i) throw std::invalid_argument("lower_triangular_solve: T is not lower triangular");
      for (std::size_t q = ptr[j]; q < ptr[j + 1]; ++q) {
        touch(idx[q], i);
        acc[idx[q]] -= tv[k] * val[q];
      }
    }
    if (diag == 0.0) {
      throw SingularMatrixError("lower_triangular_solve: zero diagonal in row " +
                                    std::to_string(i),
                                i);
    }
    std::sort(pattern.begin(), pattern.end());
    for (std::size_t c : pattern) {
      const double v = acc[c] / diag;
      if (v != 0.0) {
        idx.push_back(c);
        val.push_back(v);
      }
    }
    ptr[i + 1] = val.size();
  }
  return SparseMatrix::from_csr(n, b.cols(), std::move(ptr), std::move(idx), std::move(val));
}

}  // namespace epss
