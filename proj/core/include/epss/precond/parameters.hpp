#pragma once

#include "epss/linalg/sparse_matrix.hpp"
#include "epss/saddle/system.hpp"

namespace epss {

/// A shift parameter estimate. `degenerate` is set when C_S = 0, in which
/// case `value` is 0.
struct BetaEstimate {
  double value = 0.0;
  bool degenerate = false;
  /// Quantity under the root (ratio of norms for beta*, of traces for beta**).
  double radicand = 0.0;
};

/// beta* = sqrt(||(B A_alpha^{-1} B^T + C_P) Q2^{-1} C_S||_F / ||Q2||_F) with
/// A_alpha = A + alpha Q1. Evaluated one column of Q2^{-1} C_S at a time, so
/// no dense m x m or n x m matrix is ever formed.
BetaEstimate beta_star(const SaddleSystem& sys, const SparseMatrix& c_p, const SparseMatrix& c_s,
                       double alpha, const SparseMatrix& q1, const SparseMatrix& q2);

/// beta** = (-trace((B B^T + C_P^T C_P) Q2^{-1} C_S^2 Q2^{-1}) / trace(Q2^2))^(1/4),
/// using sparse products only.
BetaEstimate beta_double_star(const SaddleSystem& sys, const SparseMatrix& c_p,
                              const SparseMatrix& c_s, const SparseMatrix& q2);

/// Both estimates for the SEPSS splitting (triangular split of C, diagonal
/// shift bases).
BetaEstimate sepss_beta_star(const SaddleSystem& sys, double alpha);
BetaEstimate sepss_beta_double_star(const SaddleSystem& sys);

}  // namespace epss
