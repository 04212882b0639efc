#include <cmath>

#include "epss/linalg/lu.hpp"
#include "epss/precond/config.hpp"
#include "epss/precond/parameters.hpp"
#include "epss/saddle/splitting.hpp"

namespace epss {

namespace {

bool is_diagonal(const SparseMatrix& a) {
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j : a.row_cols(i)) {
      if (j != i) return false;
    }
  }
  return true;
}

// Q^{-1} X for symmetric positive definite Q.
SparseMatrix left_solve(const SparseMatrix& q, const SparseMatrix& x) {
  if (is_diagonal(q)) {
    Vector inv = q.diagonal();
    for (double& v : inv) v = 1.0 / v;
    return scale_rows(x, inv);
  }
  return SparseMatrix::from_dense(lu_factor(q).solve(x.to_dense()));
}

// sum_ij A_ij B_ij
double elementwise_dot(const SparseMatrix& a, const SparseMatrix& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto ac = a.row_cols(i), bc = b.row_cols(i);
    const auto av = a.row_values(i), bv = b.row_values(i);
    std::size_t p = 0, q = 0;
    while (p < ac.size() && q < bc.size()) {
      if (ac[p] < bc[q]) {
        ++p;
      } else if (bc[q] < ac[p]) {
        ++q;
      } else {
        s += av[p++] * bv[q++];
      }
    }
  }
  return s;
}

}  // namespace

BetaEstimate beta_star(const SaddleSystem& sys, const SparseMatrix& c_p, const SparseMatrix& c_s,
                       double alpha, const SparseMatrix& q1, const SparseMatrix& q2) {
  BetaEstimate est;
  if (c_s.empty()) {
    est.degenerate = true;
    return est;
  }
  const std::size_t n = sys.n(), m = sys.m();
  const LuFactors a_alpha = lu_factor(add(sys.a(), q1, 1.0, alpha));
  const SparseMatrix y = left_solve(q2, c_s);                 // Q2^{-1} C_S
  const SparseMatrix g_t = transpose(multiply(transpose(sys.b()), y));  // rows = columns of B^T Y
  const SparseMatrix y_t = transpose(y);
  const SparseMatrix cpy_t = transpose(multiply(c_p, y));

  double sum = 0.0;
  Vector z(n), col(m);
  for (std::size_t j = 0; j < m; ++j) {
    if (y_t.row_cols(j).empty()) continue;
    std::fill(z.begin(), z.end(), 0.0);
    const auto gc = g_t.row_cols(j);
    const auto gv = g_t.row_values(j);
    for (std::size_t k = 0; k < gc.size(); ++k) z[gc[k]] = gv[k];
    a_alpha.solve_in_place(z);
    sys.b().multiply(z, col);
    const auto pc = cpy_t.row_cols(j);
    const auto pv = cpy_t.row_values(j);
    for (std::size_t k = 0; k < pc.size(); ++k) col[pc[k]] += pv[k];
    sum += dot(col, col);
  }
  est.radicand = std::sqrt(sum) / frobenius_norm(q2);
  est.value = std::sqrt(est.radicand);
  return est;
}

BetaEstimate beta_double_star(const SaddleSystem& sys, const SparseMatrix& c_p,
                              const SparseMatrix& c_s, const SparseMatrix& q2) {
  BetaEstimate est;
  if (c_s.empty()) {
    est.degenerate = true;
    return est;
  }
  const SparseMatrix mm = add(multiply(sys.b(), transpose(sys.b())),
                              multiply(transpose(c_p), c_p));
  const SparseMatrix y = left_solve(q2, c_s);                   // Q2^{-1} C_S
  const SparseMatrix w = transpose(left_solve(q2, transpose(c_s)));  // C_S Q2^{-1}
  const SparseMatrix k = multiply(y, w);
  // trace(M K) = sum_ij M_ij K_ji
  const double tr = elementwise_dot(mm, transpose(k));
  const double tr_q2sq = elementwise_dot(q2, transpose(q2));
  est.radicand = -tr / tr_q2sq;
  est.value = std::pow(std::max(est.radicand, 0.0), 0.25);
  return est;
}

BetaEstimate sepss_beta_star(const SaddleSystem& sys, double alpha) {
  const auto [c_p, c_s] = triangular_splitting(sys.c());
  const auto [q1, q2] = diagonal_shift_bases(sys);
  return beta_star(sys, c_p, c_s, alpha, q1, q2);
}

BetaEstimate sepss_beta_double_star(const SaddleSystem& sys) {
  const auto [c_p, c_s] = triangular_splitting(sys.c());
  const auto [q1, q2] = diagonal_shift_bases(sys);
  return beta_double_star(sys, c_p, c_s, q2);
}

}  // namespace epss
