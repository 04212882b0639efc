#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "epss/linalg/sparse_matrix.hpp"
#include "epss/linalg/types.hpp"

namespace epss {

using ComplexSpectrum = std::vector<std::complex<double>>;

/// Desk-scale guard for every dense spectral routine.
inline constexpr std::size_t kDenseSpectralLimit = 2000;

/// Full spectrum via Hessenberg reduction and shifted QR.
ComplexSpectrum dense_eigenvalues(const DenseMatrix& a);

/// Number of singular values above tol * sigma_max.
std::size_t rank_with_tol(const DenseMatrix& a, double tol = 1e-8);

/// Orthonormal basis (columns) of the right null space: singular vectors whose
/// singular value is at most tol * sigma_max. A zero matrix has a full basis.
DenseMatrix null_space(const DenseMatrix& a, double tol);

DenseMatrix symmetric_part(const DenseMatrix& a);
DenseMatrix skew_part(const DenseMatrix& a);

/// Cholesky of the symmetric part succeeds.
bool is_positive_definite(const DenseMatrix& a);
bool is_positive_definite(const SparseMatrix& a);
/// Smallest eigenvalue of the symmetric part >= -1e-10 * ||A||_F.
bool is_positive_semidefinite(const DenseMatrix& a);
/// Same criterion, evaluated as a Cholesky of sym(A) + 1e-10 ||A||_F I.
bool is_positive_semidefinite(const SparseMatrix& a);

double frobenius_norm(const DenseMatrix& a);
double trace(const DenseMatrix& a);

}  // namespace epss
