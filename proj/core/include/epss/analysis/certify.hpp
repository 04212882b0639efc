#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "epss/linalg/spectral.hpp"
#include "epss/linalg/types.hpp"
#include "epss/precond/config.hpp"
#include "epss/saddle/system.hpp"

namespace epss {

/// Two formulas for the same matrix disagree; signals a splitting bug.
class InconsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Dense Sigma, P and S of one configuration, each of order n + m.
struct DenseSplitting {
  DenseMatrix sigma;
  DenseMatrix p;  ///< [[A_P, B_P^T], [-B_P, C_P]]
  DenseMatrix s;  ///< [[A_S, B_S^T], [-B_S, C_S]]
};

DenseSplitting dense_splitting(const SaddleSystem& sys, const EpssConfig& cfg);

/// (Sigma + P) Sigma^{-1} (Sigma + S) as a product of dense factors.
DenseMatrix preconditioner_product(const SaddleSystem& sys, const EpssConfig& cfg);

/// The same matrix from its multiplied-out 2x2 block formula.
DenseMatrix preconditioner_blocks(const SaddleSystem& sys, const EpssConfig& cfg);

/// [[A + P_alpha, B^T], [-B, C_P + P_beta]] * blockdiag(I, P_beta^{-1}(C_S + P_beta)).
DenseMatrix sepss_preconditioner_factored(const SaddleSystem& sys, const EpssConfig& cfg);

/// (Sigma + S)^{-1} (Sigma - P) (Sigma + P)^{-1} (Sigma - S)
DenseMatrix iteration_matrix_product(const SaddleSystem& sys, const EpssConfig& cfg);
/// I - 2 Pfrak^{-1} A
DenseMatrix iteration_matrix_preconditioned(const SaddleSystem& sys, const EpssConfig& cfg);
/// M^{-1} N with M = (Sigma + P) Sigma^{-1} (Sigma + S) / 2 and
/// N = (Sigma - P) Sigma^{-1} (Sigma - S) / 2.
DenseMatrix iteration_matrix_mn(const SaddleSystem& sys, const EpssConfig& cfg);

/// Four-factor Gamma, cross-checked against M^{-1} N to 1e-10 (relative
/// Frobenius). Throws InconsistencyError on disagreement and DimensionError
/// above the desk-scale limit.
DenseMatrix iteration_matrix_dense(const SaddleSystem& sys, const EpssConfig& cfg);

struct CertifyOptions {
  double unit_tol = 1e-8;  ///< |lambda - 1| <= unit_tol counts as lambda = 1
  double rank_tol = 1e-8;  ///< relative to sigma_max
};

struct SpectralReport {
  ComplexSpectrum spectrum;
  double rho = 0.0;
  double nu = 0.0;  ///< max |lambda| over |lambda - 1| > unit_tol
  std::size_t unit_count = 0;
  bool has_unit_eigenvalue = false;
  std::size_t rank_i_minus_gamma = 0;
  std::size_t rank_i_minus_gamma_sq = 0;
  bool index_one = false;
  bool semi_convergent = false;
};

SpectralReport certify_iteration_matrix(const DenseMatrix& gamma, const CertifyOptions& opts = {});
SpectralReport certify(const SaddleSystem& sys, const EpssConfig& cfg,
                       const CertifyOptions& opts = {});

/// Orthonormal basis (columns) of the eigenspace of Gamma at lambda = 1,
/// i.e. null(I - Gamma) at the given rank tolerance.
DenseMatrix unit_eigenvectors(const DenseMatrix& gamma, double rank_tol = 1e-8);

struct CorollaryReport {
  DenseMatrix null_basis;  ///< columns span null(C + C^T)
  bool null_contained = false;  ///< null(C + C^T) ⊆ null(C)
  bool condition1 = false;
  bool condition2 = false;
  bool condition3 = false;
  bool condition4 = false;
  /// Per basis vector r: r^T (P_beta + C_S P_beta^{-1} C_S^T) r
  std::vector<double> shift_form;
  /// Per basis vector r: r^T (B_S P_alpha^{-1} B_P^T) r
  std::vector<double> coupling_form;
  bool semi_convergent() const {
    return null_contained && (condition1 || condition2 || condition3 || condition4);
  }
};

/// Conditions 1 and 2 are evaluated over the whole null space through the
/// symmetric part of the reduced forms: condition 1 holds when the difference
/// of the two forms is definite there, condition 2 when the coupling form is
/// negative semidefinite (largest eigenvalue <= 1e-12 scale). Condition 3 is
/// containment in null(B_S^T) or in null(B_P^T).
CorollaryReport corollary_check(const SaddleSystem& sys, const EpssConfig& cfg);

struct TheoremCheck {
  std::size_t unit_modulus = 0;  ///< eigenvalues with ||lambda| - 1| <= tol, lambda != 1
  std::size_t pairs_tested = 0;
  std::size_t violations = 0;
  bool passes() const { return violations == 0; }
};

/// A posteriori test: for every unit-modulus eigenvalue lambda != 1 and null
/// basis vector r of C + C^T, flags equality of
/// r^T (P_beta - B_S P_alpha^{-1} B_P^T + C_S P_beta^{-1} C_P) r and
/// (1 + lambda) / (1 - lambda) r^T C r within 1e-8 relative.
TheoremCheck theorem_condition_check(const SaddleSystem& sys, const EpssConfig& cfg,
                                     const SpectralReport& spectral,
                                     const CertifyOptions& opts = {});

}  // namespace epss
