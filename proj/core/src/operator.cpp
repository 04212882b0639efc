#include <string>

#include "epss/errors.hpp"
#include "epss/precond/operator.hpp"

namespace epss {

namespace {

std::shared_ptr<const LuFactors> factor_stage(const SparseMatrix& a, const char* stage) {
  try {
    return std::make_shared<const LuFactors>(lu_factor(a));
  } catch (const SingularMatrixError& e) {
    throw PreconditionerError(stage, e.what());
  }
}

void require_size(std::span<const double> x, std::span<double> y, std::size_t size) {
  if (x.size() != size || y.size() != size) {
    throw DimensionError("EpssOperator::apply: vector length " + std::to_string(x.size()) +
                         ", operator size " + std::to_string(size));
  }
}

}  // namespace

EpssOperator EpssOperator::build_generic(const SaddleSystem& sys, const EpssConfig& cfg) {
  const std::size_t n = sys.n(), m = sys.m();
  const auto& s = cfg.splitting;
  const SparseMatrix p = block_2x2(s.a_p, transpose(s.b_p), scaled(s.b_p, -1.0), s.c_p);
  const SparseMatrix sk = block_2x2(s.a_s, transpose(s.b_s), scaled(s.b_s, -1.0), s.c_s);

  EpssOperator op;
  op.mode_ = Mode::generic;
  op.n_ = n;
  op.m_ = m;
  op.sigma_ = block_2x2(cfg.shifts.p_alpha, SparseMatrix(n, m), SparseMatrix(m, n),
                        cfg.shifts.p_beta);
  op.sigma_plus_p_ = factor_stage(add(op.sigma_, p), "Sigma + P");
  op.sigma_plus_s_ = factor_stage(add(op.sigma_, sk), "Sigma + S");
  return op;
}

EpssOperator EpssOperator::build_sepss(const SaddleSystem& sys, double alpha,
                                       const SparseMatrix& q1, double beta,
                                       const SparseMatrix& q2) {
  if (!(alpha > 0.0) || !(beta > 0.0)) {
    throw std::invalid_argument("build_sepss: alpha and beta must be positive");
  }
  EpssOperator op;
  op.mode_ = Mode::sepss;
  op.n_ = sys.n();
  op.m_ = sys.m();
  op.b_ = sys.b();
  op.p_beta_ = scaled(q2, beta);
  const SparseMatrix p_alpha = scaled(q1, alpha);
  const auto [c_p, c_s] = triangular_splitting(sys.c());

  op.cp_shifted_ = add(c_p, op.p_beta_);
  op.cp_triangular_ = is_triangular(op.cp_shifted_, Triangle::lower);

  // W = (C_P + P_beta)^{-1} B, then N = A + P_alpha + B^T W.
  SparseMatrix w;
  try {
    if (op.cp_triangular_) {
      w = lower_triangular_solve(op.cp_shifted_, sys.b());
    } else {
      // Non-diagonal P_beta: C_P + P_beta loses its triangular structure and
      // every column of B costs a full LU solve.
      op.cp_lu_ = std::make_shared<const LuFactors>(lu_factor(op.cp_shifted_));
      w = SparseMatrix::from_dense(op.cp_lu_->solve(sys.b().to_dense()));
    }
  } catch (const SingularMatrixError& e) {
    throw PreconditionerError("C_P + P_beta", e.what());
  }
  op.schur_ = add(add(sys.a(), p_alpha), multiply(transpose(sys.b()), w));
  op.schur_lu_ = factor_stage(op.schur_, "N");
  op.cs_lu_ = factor_stage(add(c_s, op.p_beta_), "C_S + P_beta");
  return op;
}

EpssOperator EpssOperator::build(const SaddleSystem& sys, const EpssConfig& cfg) {
  if (cfg.preset == Preset::sepss) return build_sepss(sys, cfg.alpha, cfg.q1, cfg.beta, cfg.q2);
  return build_generic(sys, cfg);
}

void EpssOperator::apply(std::span<const double> x, std::span<double> y) const {
  require_size(x, y, size());
  if (mode_ == Mode::generic) {
    apply_generic(x, y);
  } else {
    apply_sepss(x, y);
  }
}

BlockVector EpssOperator::apply(const BlockVector& x) const {
  if (x.x.size() != n_ || x.y.size() != m_) {
    throw DimensionError("EpssOperator::apply: block lengths do not match");
  }
  Vector y(size());
  apply(x.flatten(), y);
  return BlockVector::split(y, n_);
}

void EpssOperator::apply_generic(std::span<const double> x, std::span<double> y) const {
  Vector t(x.begin(), x.end());
  sigma_plus_p_->solve_in_place(t);
  sigma_.multiply(t, y);
  sigma_plus_s_->solve_in_place(y);
}

void EpssOperator::solve_cp(std::span<double> r) const {
  if (cp_triangular_) {
    triangular_solve_in_place(cp_shifted_, r, /*lower=*/true);
  } else {
    cp_lu_->solve_in_place(r);
  }
}

void EpssOperator::apply_sepss(std::span<const double> x, std::span<double> y) const {
  const auto x1 = x.first(n_), x2 = x.subspan(n_);
  auto y1 = y.first(n_), y2 = y.subspan(n_);

  // (1) (C_P + P_beta) s2 = x2
  Vector s2(x2.begin(), x2.end());
  solve_cp(s2);
  // (2) s1 = x1 - B^T s2
  Vector bt_s2(n_);
  b_.multiply_transpose(s2, bt_s2);
  for (std::size_t i = 0; i < n_; ++i) y1[i] = x1[i] - bt_s2[i];
  // (3) N y1 = s1
  schur_lu_->solve_in_place(y1);
  // (4) (C_P + P_beta) z2 = B y1 + x2
  Vector z2(x2.begin(), x2.end());
  b_.multiply_add(1.0, y1, z2);
  solve_cp(z2);
  // (5) (C_S + P_beta) y2 = P_beta z2
  p_beta_.multiply(z2, y2);
  cs_lu_->solve_in_place(y2);
}

void IterationOperator::apply(std::span<const double> v, std::span<double> out) const {
  Vector av(v.size());
  apply_full(*sys_, v, av);
  op_->apply(av, out);
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] - 2.0 * out[i];
}

Vector IterationOperator::apply(std::span<const double> v) const {
  Vector out(v.size());
  apply(v, out);
  return out;
}

}  // namespace epss
