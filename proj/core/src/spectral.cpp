#include "epss/linalg/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "epss/errors.hpp"

namespace epss {

namespace {

void require_square(const DenseMatrix& a, const char* what) {
  if (a.rows() != a.cols()) throw DimensionError(std::string(what) + ": matrix not square");
}

void require_desk_scale(const DenseMatrix& a, const char* what) {
  if (static_cast<std::size_t>(std::max(a.rows(), a.cols())) > kDenseSpectralLimit) {
    throw DimensionError(std::string(what) + ": order exceeds the dense limit of " +
                         std::to_string(kDenseSpectralLimit));
  }
}

Eigen::SparseMatrix<double> to_eigen(const SparseMatrix& a) {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(a.nnz());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto cols = a.row_cols(i);
    const auto vals = a.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      t.emplace_back(static_cast<int>(i), static_cast<int>(cols[k]), vals[k]);
    }
  }
  Eigen::SparseMatrix<double> m(static_cast<Eigen::Index>(a.rows()),
                                static_cast<Eigen::Index>(a.cols()));
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

bool sparse_cholesky_ok(const SparseMatrix& spd) {
  if (spd.rows() == 0) return true;
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(to_eigen(spd));
  return llt.info() == Eigen::Success;
}

}  // namespace

ComplexSpectrum dense_eigenvalues(const DenseMatrix& a) {
  require_square(a, "dense_eigenvalues");
  require_desk_scale(a, "dense_eigenvalues");
  if (a.rows() == 0) return {};
  Eigen::EigenSolver<Eigen::MatrixXd> solver(Eigen::MatrixXd(a), /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError("dense_eigenvalues: QR iteration did not converge");
  }
  const auto& ev = solver.eigenvalues();
  return ComplexSpectrum(ev.data(), ev.data() + ev.size());
}

std::size_t rank_with_tol(const DenseMatrix& a, double tol) {
  if (a.size() == 0) return 0;
  require_desk_scale(a, "rank_with_tol");
  Eigen::BDCSVD<Eigen::MatrixXd> svd{Eigen::MatrixXd(a)};
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  const double cut = tol * s(0);
  return static_cast<std::size_t>((s.array() > cut).count());
}

DenseMatrix null_space(const DenseMatrix& a, double tol) {
  require_desk_scale(a, "null_space");
  const Eigen::Index n = a.cols();
  if (a.rows() == 0 || n == 0) return DenseMatrix::Identity(n, n);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(Eigen::MatrixXd(a), Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double cut = s.size() ? tol * s(0) : 0.0;
  Eigen::Index rank = 0;
  if (s.size() && s(0) > 0.0) rank = (s.array() > cut).count();
  return svd.matrixV().rightCols(n - rank);
}

DenseMatrix symmetric_part(const DenseMatrix& a) {
  require_square(a, "symmetric_part");
  return 0.5 * (a + a.transpose());
}

DenseMatrix skew_part(const DenseMatrix& a) {
  require_square(a, "skew_part");
  return 0.5 * (a - a.transpose());
}

bool is_positive_definite(const DenseMatrix& a) {
  require_square(a, "is_positive_definite");
  if (a.rows() == 0) return true;
  Eigen::LLT<Eigen::MatrixXd> llt(Eigen::MatrixXd(symmetric_part(a)));
  return llt.info() == Eigen::Success;
}

bool is_positive_definite(const SparseMatrix& a) {
  if (!a.is_square()) throw DimensionError("is_positive_definite: matrix not square");
  return sparse_cholesky_ok(symmetric_part(a));
}

bool is_positive_semidefinite(const DenseMatrix& a) {
  require_square(a, "is_positive_semidefinite");
  if (a.rows() == 0) return true;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Eigen::MatrixXd(symmetric_part(a)),
                                                     Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff() >= -1e-10 * frobenius_norm(a);
}

bool is_positive_semidefinite(const SparseMatrix& a) {
  if (!a.is_square()) throw DimensionError("is_positive_semidefinite: matrix not square");
  if (a.empty()) return true;
  const double shift = 1e-10 * frobenius_norm(a);
  return sparse_cholesky_ok(add(symmetric_part(a), SparseMatrix::identity(a.rows(), shift)));
}

double frobenius_norm(const DenseMatrix& a) { return a.norm(); }

double trace(const DenseMatrix& a) {
  if (a.rows() != a.cols()) {
    throw DimensionError("trace of non-square " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()));
  }
  return a.trace();
}

}  // namespace epss
