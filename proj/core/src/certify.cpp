#include "epss/analysis/certify.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "epss/errors.hpp"

namespace epss {

namespace {

constexpr double kCrossCheckTol = 1e-10;
constexpr double kNullTol = 1e-10;
constexpr double kGapTol = 1e-10;
constexpr double kCouplingTol = 1e-12;
constexpr double kEqualityTol = 1e-8;

void require_desk_scale(const SaddleSystem& sys, const char* who) {
  if (sys.size() > kDenseSpectralLimit) {
    throw DimensionError(std::string(who) + ": n + m = " + std::to_string(sys.size()) +
                         " exceeds the dense limit " + std::to_string(kDenseSpectralLimit));
  }
}

DenseMatrix block_dense(const SparseMatrix& a11, const SparseMatrix& b, const SparseMatrix& c) {
  return block_2x2(a11, transpose(b), scaled(b, -1.0), c).to_dense();
}

DenseMatrix identity(Eigen::Index n) { return DenseMatrix::Identity(n, n); }

// A^{-1} B for symmetric positive definite A.
DenseMatrix spd_solve(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() == 0) return DenseMatrix(0, b.cols());
  Eigen::LLT<Eigen::MatrixXd> llt{Eigen::MatrixXd(a)};
  if (llt.info() != Eigen::Success) {
    throw SingularMatrixError("shift matrix is not positive definite", 0);
  }
  return llt.solve(Eigen::MatrixXd(b));
}

DenseMatrix lu_solve(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() == 0) return DenseMatrix(0, b.cols());
  Eigen::PartialPivLU<Eigen::MatrixXd> lu{Eigen::MatrixXd(a)};
  return lu.solve(Eigen::MatrixXd(b));
}

double relative_gap(const DenseMatrix& x, const DenseMatrix& y) {
  return (x - y).norm() / std::max(1.0, x.norm());
}

Eigen::VectorXd reduced_eigenvalues(const DenseMatrix& z, const DenseMatrix& form) {
  const Eigen::MatrixXd sym = 0.5 * (form + form.transpose());
  const Eigen::MatrixXd reduced = z.transpose() * sym * z;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(reduced, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

}  // namespace

DenseSplitting dense_splitting(const SaddleSystem& sys, const EpssConfig& cfg) {
  require_desk_scale(sys, "dense_splitting");
  const auto& s = cfg.splitting;
  DenseSplitting out;
  out.sigma = block_2x2(cfg.shifts.p_alpha, SparseMatrix(), SparseMatrix(), cfg.shifts.p_beta)
                  .to_dense();
  out.p = block_dense(s.a_p, s.b_p, s.c_p);
  out.s = block_dense(s.a_s, s.b_s, s.c_s);
  return out;
}

DenseMatrix preconditioner_product(const SaddleSystem& sys, const EpssConfig& cfg) {
  const DenseSplitting d = dense_splitting(sys, cfg);
  return (d.sigma + d.p) * spd_solve(d.sigma, d.sigma + d.s);
}

DenseMatrix preconditioner_blocks(const SaddleSystem& sys, const EpssConfig& cfg) {
  require_desk_scale(sys, "preconditioner_blocks");
  const auto& s = cfg.splitting;
  const DenseMatrix pa = cfg.shifts.p_alpha.to_dense();
  const DenseMatrix pb = cfg.shifts.p_beta.to_dense();
  const DenseMatrix a = sys.a().to_dense();
  const DenseMatrix c = sys.c().to_dense();
  const DenseMatrix ap = s.a_p.to_dense(), as = s.a_s.to_dense();
  const DenseMatrix bp = s.b_p.to_dense(), bs = s.b_s.to_dense();
  const DenseMatrix cp = s.c_p.to_dense(), cs = s.c_s.to_dense();
  const auto n = a.rows(), m = c.rows();

  const DenseMatrix pa_as = spd_solve(pa, as);
  const DenseMatrix pa_bst = spd_solve(pa, bs.transpose());
  const DenseMatrix pb_bs = spd_solve(pb, bs);
  const DenseMatrix pb_cs = spd_solve(pb, cs);

  DenseMatrix out(n + m, n + m);
  out.topLeftCorner(n, n) = pa + a + ap * pa_as - bp.transpose() * pb_bs;
  out.topRightCorner(n, m) = (pa + ap) * pa_bst + bp.transpose() * spd_solve(pb, pb + cs);
  out.bottomLeftCorner(m, n) = -bp * spd_solve(pa, pa + as) - (pb + cp) * pb_bs;
  out.bottomRightCorner(m, m) = pb + c + cp * pb_cs - bp * pa_bst;
  return out;
}

DenseMatrix sepss_preconditioner_factored(const SaddleSystem& sys, const EpssConfig& cfg) {
  require_desk_scale(sys, "sepss_preconditioner_factored");
  const auto& s = cfg.splitting;
  const auto n = static_cast<Eigen::Index>(sys.n());
  const auto m = static_cast<Eigen::Index>(sys.m());
  const DenseMatrix left = block_dense(add(sys.a(), cfg.shifts.p_alpha), sys.b(),
                                       add(s.c_p, cfg.shifts.p_beta));
  const DenseMatrix pb = cfg.shifts.p_beta.to_dense();
  DenseMatrix right = identity(n + m);
  right.bottomRightCorner(m, m) = spd_solve(pb, pb + s.c_s.to_dense());
  return left * right;
}

DenseMatrix iteration_matrix_product(const SaddleSystem& sys, const EpssConfig& cfg) {
  const DenseSplitting d = dense_splitting(sys, cfg);
  const DenseMatrix right = lu_solve(d.sigma + d.p, d.sigma - d.s);
  return lu_solve(d.sigma + d.s, (d.sigma - d.p) * right);
}

DenseMatrix iteration_matrix_preconditioned(const SaddleSystem& sys, const EpssConfig& cfg) {
  const DenseMatrix pfrak = preconditioner_product(sys, cfg);
  const DenseMatrix full = assemble_full(sys).to_dense();
  return identity(pfrak.rows()) - 2.0 * lu_solve(pfrak, full);
}

DenseMatrix iteration_matrix_mn(const SaddleSystem& sys, const EpssConfig& cfg) {
  const DenseSplitting d = dense_splitting(sys, cfg);
  const DenseMatrix m = 0.5 * (d.sigma + d.p) * spd_solve(d.sigma, d.sigma + d.s);
  const DenseMatrix nn = 0.5 * (d.sigma - d.p) * spd_solve(d.sigma, d.sigma - d.s);
  return lu_solve(m, nn);
}

DenseMatrix iteration_matrix_dense(const SaddleSystem& sys, const EpssConfig& cfg) {
  DenseMatrix gamma = iteration_matrix_product(sys, cfg);
  const double gap = relative_gap(gamma, iteration_matrix_mn(sys, cfg));
  if (!(gap <= kCrossCheckTol)) {
    throw InconsistencyError("iteration_matrix_dense: four-factor and M^{-1}N forms differ by " +
                             std::to_string(gap));
  }
  return gamma;
}

SpectralReport certify_iteration_matrix(const DenseMatrix& gamma, const CertifyOptions& opts) {
  if (gamma.rows() != gamma.cols()) throw DimensionError("certify: Gamma must be square");
  SpectralReport rep;
  rep.spectrum = dense_eigenvalues(gamma);
  for (const auto& lambda : rep.spectrum) {
    const double mod = std::abs(lambda);
    rep.rho = std::max(rep.rho, mod);
    if (std::abs(lambda - 1.0) <= opts.unit_tol) {
      ++rep.unit_count;
    } else {
      rep.nu = std::max(rep.nu, mod);
    }
  }
  rep.has_unit_eigenvalue = rep.unit_count > 0;
  const DenseMatrix i_minus = identity(gamma.rows()) - gamma;
  rep.rank_i_minus_gamma = rank_with_tol(i_minus, opts.rank_tol);
  rep.rank_i_minus_gamma_sq = rank_with_tol(i_minus * i_minus, opts.rank_tol);
  rep.index_one = rep.rank_i_minus_gamma == rep.rank_i_minus_gamma_sq;
  rep.semi_convergent = rep.nu < 1.0 && rep.index_one;
  return rep;
}

SpectralReport certify(const SaddleSystem& sys, const EpssConfig& cfg, const CertifyOptions& opts) {
  return certify_iteration_matrix(iteration_matrix_dense(sys, cfg), opts);
}

DenseMatrix unit_eigenvectors(const DenseMatrix& gamma, double rank_tol) {
  return null_space(identity(gamma.rows()) - gamma, rank_tol);
}

CorollaryReport corollary_check(const SaddleSystem& sys, const EpssConfig& cfg) {
  require_desk_scale(sys, "corollary_check");
  const auto& s = cfg.splitting;
  const DenseMatrix c = sys.c().to_dense();
  const DenseMatrix pa = cfg.shifts.p_alpha.to_dense();
  const DenseMatrix pb = cfg.shifts.p_beta.to_dense();
  const DenseMatrix cs = s.c_s.to_dense();
  const DenseMatrix bp = s.b_p.to_dense(), bs = s.b_s.to_dense();

  CorollaryReport rep;
  rep.null_basis = null_space(c + c.transpose(), kNullTol);
  const DenseMatrix& z = rep.null_basis;
  const Eigen::Index k = z.cols();

  const double c_scale = std::max(1.0, c.norm());
  rep.null_contained = true;
  for (Eigen::Index j = 0; j < k; ++j) {
    if ((c * z.col(j)).norm() > kNullTol * c_scale) rep.null_contained = false;
  }

  const DenseMatrix shift_form = pb + cs * spd_solve(pb, cs.transpose());
  const DenseMatrix coupling = bs * spd_solve(pa, bp.transpose());
  for (Eigen::Index j = 0; j < k; ++j) {
    rep.shift_form.push_back(z.col(j).dot(shift_form * z.col(j)));
    rep.coupling_form.push_back(z.col(j).dot(coupling * z.col(j)));
  }

  if (k == 0) {
    rep.condition1 = rep.condition2 = rep.condition3 = true;
  } else {
    const double scale = std::max({1.0, shift_form.norm(), coupling.norm()});
    const Eigen::VectorXd diff = reduced_eigenvalues(z, shift_form - coupling);
    rep.condition1 = diff.minCoeff() > kGapTol * scale || diff.maxCoeff() < -kGapTol * scale;
    const Eigen::VectorXd coup = reduced_eigenvalues(z, coupling);
    rep.condition2 = coup.maxCoeff() <= kCouplingTol * std::max(1.0, coupling.norm());
    const double b_scale = std::max(1.0, sys.b().to_dense().norm());
    rep.condition3 = (bs.transpose() * z).norm() <= kNullTol * b_scale ||
                     (bp.transpose() * z).norm() <= kNullTol * b_scale;
  }
  rep.condition4 =
      is_positive_definite(sys.c()) || s.b_s.nnz() == 0 || s.b_p.nnz() == 0;
  return rep;
}

TheoremCheck theorem_condition_check(const SaddleSystem& sys, const EpssConfig& cfg,
                                     const SpectralReport& spectral, const CertifyOptions& opts) {
  require_desk_scale(sys, "theorem_condition_check");
  TheoremCheck out;
  std::vector<std::complex<double>> lambdas;
  for (const auto& lambda : spectral.spectrum) {
    if (std::abs(lambda - 1.0) > opts.unit_tol && std::abs(std::abs(lambda) - 1.0) <= opts.unit_tol) {
      lambdas.push_back(lambda);
    }
  }
  out.unit_modulus = lambdas.size();
  if (lambdas.empty()) return out;

  const auto& s = cfg.splitting;
  const DenseMatrix c = sys.c().to_dense();
  const DenseMatrix z = null_space(c + c.transpose(), kNullTol);
  if (z.cols() == 0) return out;
  const DenseMatrix pa = cfg.shifts.p_alpha.to_dense();
  const DenseMatrix pb = cfg.shifts.p_beta.to_dense();
  const DenseMatrix t = pb - s.b_s.to_dense() * spd_solve(pa, s.b_p.to_dense().transpose()) +
                        s.c_s.to_dense() * spd_solve(pb, s.c_p.to_dense());
  for (const auto& lambda : lambdas) {
    const std::complex<double> factor = (1.0 + lambda) / (1.0 - lambda);
    for (Eigen::Index j = 0; j < z.cols(); ++j) {
      const double lhs = z.col(j).dot(t * z.col(j));
      const std::complex<double> rhs = factor * z.col(j).dot(c * z.col(j));
      ++out.pairs_tested;
      const double scale = std::max(std::abs(lhs), std::abs(rhs));
      if (std::abs(lhs - rhs) <= kEqualityTol * scale) ++out.violations;
    }
  }
  return out;
}

}  // namespace epss
