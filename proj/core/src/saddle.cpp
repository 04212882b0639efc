#include <algorithm>
#include <cmath>
#include <string>

#include "epss/errors.hpp"
#include "epss/linalg/spectral.hpp"
#include "epss/saddle/splitting.hpp"
#include "epss/saddle/system.hpp"

namespace epss {

Vector BlockVector::flatten() const {
  Vector u(x);
  u.insert(u.end(), y.begin(), y.end());
  return u;
}

BlockVector BlockVector::split(std::span<const double> u, std::size_t n) {
  if (u.size() < n) throw DimensionError("BlockVector::split: vector shorter than n");
  return {Vector(u.begin(), u.begin() + static_cast<std::ptrdiff_t>(n)),
          Vector(u.begin() + static_cast<std::ptrdiff_t>(n), u.end())};
}

SaddleSystem::SaddleSystem(SparseMatrix a, SparseMatrix b, SparseMatrix c)
    : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)) {
  const auto n = a_.rows(), m = c_.rows();
  if (!a_.is_square() || !c_.is_square() || b_.rows() != m || b_.cols() != n) {
    throw DimensionError("SaddleSystem: A " + std::to_string(a_.rows()) + "x" +
                         std::to_string(a_.cols()) + ", B " + std::to_string(b_.rows()) + "x" +
                         std::to_string(b_.cols()) + ", C " + std::to_string(c_.rows()) + "x" +
                         std::to_string(c_.cols()) + " are inconsistent");
  }
  if (m > n) throw DimensionError("SaddleSystem: requires m <= n");
}

SparseMatrix assemble_full(const SaddleSystem& sys) {
  return block_2x2(sys.a(), transpose(sys.b()), scaled(sys.b(), -1.0), sys.c());
}

void apply_full(const SaddleSystem& sys, std::span<const double> u, std::span<double> out) {
  const std::size_t n = sys.n(), m = sys.m();
  if (u.size() != n + m || out.size() != n + m) {
    throw DimensionError("apply_full: vector length " + std::to_string(u.size()) +
                         ", system size " + std::to_string(n + m));
  }
  const auto x = u.first(n), y = u.subspan(n);
  auto ox = out.first(n), oy = out.subspan(n);
  sys.a().multiply(x, ox);
  // ox += B^T y, accumulated row by row of B.
  const auto& b = sys.b();
  for (std::size_t i = 0; i < m; ++i) {
    const double yi = y[i];
    const auto cols = b.row_cols(i);
    const auto vals = b.row_values(i);
    double bx = 0.0;
    for (std::size_t k = 0; k < cols.size(); ++k) {
      ox[cols[k]] += vals[k] * yi;
      bx += vals[k] * x[cols[k]];
    }
    oy[i] = -bx;
  }
  sys.c().multiply_add(1.0, y, oy);
}

BlockVector apply_blocks(const SaddleSystem& sys, const BlockVector& u) {
  if (u.x.size() != sys.n() || u.y.size() != sys.m()) {
    throw DimensionError("apply_blocks: block lengths do not match the system");
  }
  Vector out(sys.size());
  apply_full(sys, u.flatten(), out);
  return BlockVector::split(out, sys.n());
}

SystemDiagnostics validate(const SaddleSystem& sys, double rank_tol) {
  SystemDiagnostics d;
  d.a_positive_definite = is_positive_definite(sys.a());
  d.c_positive_semidefinite = is_positive_semidefinite(sys.c());
  if (sys.size() > kDenseSpectralLimit) return d;

  d.dense_checked = true;
  const DenseMatrix b = sys.b().to_dense();
  const DenseMatrix c = sys.c().to_dense();
  const auto m = static_cast<std::size_t>(c.rows());
  d.rank_b = rank_with_tol(b, rank_tol);
  d.null_dim_c_sym = m - rank_with_tol(c + c.transpose(), rank_tol);
  DenseMatrix stacked(b.cols() + c.rows(), c.cols());
  stacked << b.transpose(), c;
  d.null_dim_bt_c = m - rank_with_tol(stacked, rank_tol);
  d.singular = d.null_dim_bt_c > 0;
  return d;
}

std::pair<SparseMatrix, SparseMatrix> triangular_splitting(const SparseMatrix& c) {
  if (!c.is_square()) throw DimensionError("triangular_splitting: matrix not square");
  const SparseMatrix lower = triangle(c, Triangle::lower, /*with_diagonal=*/true);  // D + L
  const SparseMatrix upper = triangle(c, Triangle::upper, /*with_diagonal=*/false); // U
  const SparseMatrix upper_t = transpose(upper);
  return {add(lower, upper_t), add(upper, upper_t, 1.0, -1.0)};
}

std::pair<SparseMatrix, SparseMatrix> hermitian_skew_splitting(const SparseMatrix& a) {
  return {symmetric_part(a), skew_part(a)};
}

bool is_skew_symmetric(const SparseMatrix& a, double tol) {
  if (!a.is_square()) return false;
  return add(a, transpose(a)).max_abs() <= tol;
}

bool is_symmetric(const SparseMatrix& a, double tol) {
  if (!a.is_square()) return false;
  return add(a, transpose(a), 1.0, -1.0).max_abs() <= tol;
}

SplittingCheck check_splitting(const SaddleSystem& sys, const SplittingSet& s) {
  SplittingCheck chk;
  auto sum_ok = [](const SparseMatrix& whole, const SparseMatrix& p, const SparseMatrix& q) {
    if (p.rows() != whole.rows() || p.cols() != whole.cols() || q.rows() != whole.rows() ||
        q.cols() != whole.cols()) {
      return false;
    }
    const double scale = std::max({whole.max_abs(), p.max_abs(), q.max_abs(), 1e-300});
    return add(add(p, q), whole, 1.0, -1.0).max_abs() <= 1e-14 * scale;
  };
  chk.sums_match = sum_ok(sys.a(), s.a_p, s.a_s) && sum_ok(sys.b(), s.b_p, s.b_s) &&
                   sum_ok(sys.c(), s.c_p, s.c_s);
  if (!chk.sums_match) return chk;
  chk.a_p_positive_definite = is_positive_definite(s.a_p);
  chk.a_s_skew = is_skew_symmetric(s.a_s);
  chk.c_p_positive_semidefinite = is_positive_semidefinite(s.c_p);
  chk.c_s_skew = is_skew_symmetric(s.c_s);
  return chk;
}

bool check_shifts(const SaddleSystem& sys, const ShiftPair& shifts) {
  const auto& pa = shifts.p_alpha;
  const auto& pb = shifts.p_beta;
  if (pa.rows() != sys.n() || !pa.is_square() || pb.rows() != sys.m() || !pb.is_square()) {
    return false;
  }
  return is_symmetric(pa) && is_symmetric(pb) && is_positive_definite(pa) &&
         is_positive_definite(pb);
}

}  // namespace epss
