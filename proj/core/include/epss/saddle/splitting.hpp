#pragma once

#include <utility>

#include "epss/linalg/sparse_matrix.hpp"
#include "epss/saddle/system.hpp"

namespace epss {

/// A = A_P + A_S, B = B_P + B_S, C = C_P + C_S with A_P PD, A_S skew,
/// C_P PSD, C_S skew and B split arbitrarily.
struct SplittingSet {
  SparseMatrix a_p, a_s;
  SparseMatrix b_p, b_s;
  SparseMatrix c_p, c_s;
};

/// Symmetric positive definite shifts; Sigma = blockdiag(P_alpha, P_beta).
struct ShiftPair {
  SparseMatrix p_alpha;
  SparseMatrix p_beta;
};

/// C_P = D + L + U^T (lower triangular), C_S = U - U^T, pointwise blocks.
std::pair<SparseMatrix, SparseMatrix> triangular_splitting(const SparseMatrix& c);

/// ((A + A^T)/2, (A - A^T)/2)
std::pair<SparseMatrix, SparseMatrix> hermitian_skew_splitting(const SparseMatrix& a);

struct SplittingCheck {
  bool sums_match = false;
  bool a_p_positive_definite = false;
  bool a_s_skew = false;
  bool c_p_positive_semidefinite = false;
  bool c_s_skew = false;

  bool ok() const {
    return sums_match && a_p_positive_definite && a_s_skew && c_p_positive_semidefinite &&
           c_s_skew;
  }
};

SplittingCheck check_splitting(const SaddleSystem& sys, const SplittingSet& s);

/// Both shifts symmetric and Cholesky-factorizable.
bool check_shifts(const SaddleSystem& sys, const ShiftPair& shifts);

bool is_skew_symmetric(const SparseMatrix& a, double tol = 0.0);
bool is_symmetric(const SparseMatrix& a, double tol = 0.0);

}  // namespace epss
