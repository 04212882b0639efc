#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <tuple>

#include <Eigen/Dense>

#include "epss/errors.hpp"
#include "epss/analysis/certify.hpp"
#include "epss/precond/config.hpp"
#include "epss/precond/operator.hpp"
#include "epss/precond/parameters.hpp"
#include "epss/precond/stationary.hpp"
#include "random_systems.hpp"

using namespace epss;
using epss::testing::dense;
using epss::testing::random_system;
using epss::testing::relative_error;

namespace {

SparseMatrix scalar(double v) { return SparseMatrix::from_dense(DenseMatrix::Constant(1, 1, v)); }

SaddleSystem one_by_one() { return SaddleSystem(scalar(2), SparseMatrix(1, 1), SparseMatrix(1, 1)); }

Eigen::MatrixXd apply_columns(const EpssOperator& op, const Eigen::MatrixXd& x) {
  Eigen::MatrixXd y(x.rows(), x.cols());
  Vector in(static_cast<std::size_t>(x.rows())), out(in.size());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) in[static_cast<std::size_t>(i)] = x(i, j);
    op.apply(in, out);
    for (Eigen::Index i = 0; i < x.rows(); ++i) y(i, j) = out[static_cast<std::size_t>(i)];
  }
  return y;
}

// (Sigma + P) Sigma^{-1} (Sigma + S) assembled from the configuration with Eigen only.
Eigen::MatrixXd oracle_preconditioner(const SaddleSystem& sys, const EpssConfig& cfg) {
  const auto n = static_cast<Eigen::Index>(sys.n()), m = static_cast<Eigen::Index>(sys.m());
  auto block = [&](const SparseMatrix& a, const SparseMatrix& b, const SparseMatrix& c) {
    Eigen::MatrixXd out(n + m, n + m);
    const Eigen::MatrixXd bd = dense(b);
    out << dense(a), bd.transpose(), -bd, dense(c);
    return out;
  };
  const auto& s = cfg.splitting;
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(n + m, n + m);
  sigma.topLeftCorner(n, n) = dense(cfg.shifts.p_alpha);
  sigma.bottomRightCorner(m, m) = dense(cfg.shifts.p_beta);
  const Eigen::MatrixXd p = block(s.a_p, s.b_p, s.c_p);
  const Eigen::MatrixXd sk = block(s.a_s, s.b_s, s.c_s);
  return (sigma + p) * sigma.inverse() * (sigma + sk);
}

}  // namespace

TEST(Presets, NamesRoundTrip) {
  for (Preset p : kAllPresets) EXPECT_EQ(parse_preset(to_string(p)), p);
  EXPECT_EQ(parse_preset("sepss"), Preset::sepss);
  EXPECT_EQ(parse_preset("gHsS"), Preset::ghss);
  EXPECT_FALSE(parse_preset("RHSS").has_value());
}

TEST(Presets, HssWithEqualParameters) {
  const SaddleSystem sys = random_system(1, {6, 3});
  const EpssConfig cfg = preset_config(Preset::hss, sys, 0.5, 0.5);
  EXPECT_EQ(cfg.splitting.b_p.nnz(), 0u);
  EXPECT_EQ(cfg.shifts.p_alpha, SparseMatrix::identity(6, 0.5));
  EXPECT_EQ(cfg.shifts.p_beta, SparseMatrix::identity(3, 0.5));
  EXPECT_EQ(cfg.splitting.c_s.nnz(), 0u);
}

TEST(Presets, SingleParameterPresetsIgnoreBeta) {
  const SaddleSystem sys = random_system(2, {6, 3});
  for (Preset p : {Preset::hss, Preset::pss, Preset::ss}) {
    const EpssConfig cfg = preset_config(p, sys, 0.25, 7.0);
    EXPECT_EQ(cfg.beta, 0.25);
    EXPECT_EQ(cfg.shifts.p_beta, SparseMatrix::identity(3, 0.25));
  }
  EXPECT_EQ(preset_config(Preset::gpss, sys, 0.25, 7.0).shifts.p_beta, SparseMatrix::identity(3, 7.0));
}

TEST(Presets, EpssKeepsWholeC) {
  const SaddleSystem sys = random_system(3, {6, 3});
  const EpssConfig cfg = preset_config(Preset::epss, sys, 1.0, 1.0);
  EXPECT_EQ(cfg.splitting.c_p, sys.c());
  EXPECT_EQ(cfg.splitting.a_p, sys.a());
  EXPECT_EQ(cfg.splitting.b_p.nnz(), 0u);
}

TEST(Presets, DiagonalShiftRecipe) {
  const SaddleSystem sys = random_system(4, {5, 3});
  const EpssConfig cfg = preset_config(Preset::ess, sys, 0.1, 2.0);
  const Vector da = sys.a().diagonal(), dc = sys.c().diagonal();
  for (std::size_t i = 0; i < 5; ++i) EXPECT_DOUBLE_EQ(cfg.shifts.p_alpha.coeff(i, i), 0.1 * 2.0 * da[i]);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_DOUBLE_EQ(cfg.shifts.p_beta.coeff(i, i), 2.0 * (1e-4 + 2.0 * dc[i]));
  }
  EXPECT_EQ(cfg.splitting.b_s.nnz(), 0u);
}

TEST(Presets, EverySplittingSatisfiesItsInvariants) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const SaddleSystem sys = random_system(seed, {9, 4, true});
    for (Preset p : kAllPresets) {
      const EpssConfig cfg = preset_config(p, sys, 0.3, 3.0);
      const SplittingCheck check = check_splitting(sys, cfg.splitting);
      EXPECT_TRUE(check.ok()) << to_string(p) << " seed " << seed;
      EXPECT_TRUE(check_shifts(sys, cfg.shifts));
      EXPECT_TRUE(cfg.splitting.b_p.nnz() == 0 || cfg.splitting.b_s.nnz() == 0);
    }
  }
}

TEST(Presets, RejectsBadInput) {
  const SaddleSystem sys = random_system(5, {4, 2});
  EXPECT_THROW((void)preset_config(Preset::custom, sys, 1.0, 1.0), std::invalid_argument);
  EXPECT_THROW((void)preset_config(Preset::pss, sys, 0.0, 1.0), std::invalid_argument);
  EXPECT_THROW((void)preset_config(Preset::gpss, sys, 1.0, -1.0), std::invalid_argument);
}

TEST(BuildGeneric, DiagonalCaseHalvesVelocity) {
  const SaddleSystem sys(SparseMatrix::identity(2), SparseMatrix(1, 2), SparseMatrix(1, 1));
  SplittingSet s{SparseMatrix::identity(2), SparseMatrix(2, 2), SparseMatrix(1, 2),
                 SparseMatrix(1, 2),        SparseMatrix(1, 1), SparseMatrix(1, 1)};
  const EpssConfig cfg =
      custom_config(sys, s, {SparseMatrix::identity(2), SparseMatrix::identity(1, 0.5)});
  const EpssOperator op = EpssOperator::build_generic(sys, cfg);
  Vector y(3);
  op.apply(std::vector<double>{2, 4, 1}, y);
  EXPECT_DOUBLE_EQ(y[0], 1.0);
  EXPECT_DOUBLE_EQ(y[1], 2.0);
  EXPECT_DOUBLE_EQ(y[2], 2.0);
}

TEST(BuildGeneric, InvertsTheAssembledPreconditioner) {
  std::mt19937_64 rng(31);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const SaddleSystem sys = random_system(seed, {10 + seed % 7, 3 + seed % 5, true});
    for (Preset p : kAllPresets) {
      if (p == Preset::sepss) continue;
      const EpssConfig cfg = preset_config(p, sys, 0.5, 2.0);
      const EpssOperator op = EpssOperator::build_generic(sys, cfg);
      const Eigen::MatrixXd pf = oracle_preconditioner(sys, cfg);
      const Eigen::MatrixXd w = epss::testing::gaussian(rng, pf.rows(), 3);
      EXPECT_LT(relative_error(apply_columns(op, pf * w), w), 1e-10) << to_string(p);
    }
  }
}

TEST(BuildSepss, ScalarHandCase) {
  const SaddleSystem sys = one_by_one();
  const EpssOperator op = EpssOperator::build_sepss(sys, 1.0, scalar(1), 1.0, scalar(1));
  EXPECT_EQ(op.mode(), EpssOperator::Mode::sepss);
  EXPECT_DOUBLE_EQ(op.schur().coeff(0, 0), 3.0);
  Vector y(2);
  op.apply(std::vector<double>{3, 1}, y);
  EXPECT_DOUBLE_EQ(y[0], 1.0);
  EXPECT_DOUBLE_EQ(y[1], 1.0);
  op.apply(std::vector<double>{0, 0}, y);
  EXPECT_EQ(y, (Vector{0, 0}));
}

TEST(BuildSepss, SchurMatrixMatchesFormula) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const SaddleSystem sys = random_system(seed, {12, 5, true});
    const EpssConfig cfg = preset_config(Preset::sepss, sys, 0.2, 0.7);
    const EpssOperator op = EpssOperator::build(sys, cfg);
    const Eigen::MatrixXd t = dense(add(cfg.splitting.c_p, cfg.shifts.p_beta));
    const Eigen::MatrixXd b = dense(sys.b());
    const Eigen::MatrixXd n = dense(sys.a()) + dense(cfg.shifts.p_alpha) +
                              b.transpose() * t.triangularView<Eigen::Lower>().solve(b);
    EXPECT_LT(relative_error(dense(op.schur()), n), 1e-12);
  }
}

TEST(BuildSepss, DiagonalCMakesTriangularSolvesDiagonal) {
  const SaddleSystem sys(SparseMatrix::identity(3, 2.0), SparseMatrix::from_dense(SparseMatrix::identity(3).to_dense().topRows(2)),
                         SparseMatrix::diagonal(std::vector<double>{1, 2}));
  const EpssConfig cfg = preset_config(Preset::sepss, sys, 1.0, 1.0);
  EXPECT_EQ(cfg.splitting.c_s.nnz(), 0u);
  EXPECT_EQ(add(cfg.splitting.c_p, cfg.shifts.p_beta).nnz(), 2u);
}

TEST(BuildSepss, MatchesDenseFactoredForm) {
  std::mt19937_64 rng(37);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::size_t n = 2 + seed % 29, m = 1 + seed % std::min<std::size_t>(n, 15);
    const SaddleSystem sys = random_system(seed, {n, m, true});
    const EpssConfig cfg = preset_config(Preset::sepss, sys, 0.1 + 0.1 * double(seed % 5), 1.5);
    const EpssOperator op = EpssOperator::build(sys, cfg);
    const auto nn = static_cast<Eigen::Index>(n), mm = static_cast<Eigen::Index>(m);
    Eigen::MatrixXd left(nn + mm, nn + mm);
    const Eigen::MatrixXd b = dense(sys.b());
    left << dense(sys.a()) + dense(cfg.shifts.p_alpha), b.transpose(), -b,
        dense(cfg.splitting.c_p) + dense(cfg.shifts.p_beta);
    Eigen::MatrixXd right = Eigen::MatrixXd::Identity(nn + mm, nn + mm);
    const Eigen::MatrixXd pb = dense(cfg.shifts.p_beta);
    right.bottomRightCorner(mm, mm) = pb.inverse() * (dense(cfg.splitting.c_s) + pb);
    const Eigen::MatrixXd pf = left * right;
    const Eigen::MatrixXd x = epss::testing::gaussian(rng, nn + mm, 2);
    const Eigen::MatrixXd ref = pf.fullPivLu().solve(x);
    EXPECT_LT(relative_error(apply_columns(op, x), ref), 1e-10) << "seed " << seed;
    EXPECT_LT(relative_error(pf, oracle_preconditioner(sys, cfg)), 1e-12);
  }
}

TEST(BuildSepss, NonDiagonalShiftUsesLu) {
  const SaddleSystem sys = random_system(8, {8, 4, true});
  const auto [q1, q2d] = diagonal_shift_bases(sys);
  Eigen::MatrixXd q2 = dense(q2d);
  q2(0, 1) = q2(1, 0) = 0.1 * std::min(q2(0, 0), q2(1, 1));
  const SparseMatrix q2s = SparseMatrix::from_dense(q2);
  const EpssOperator op = EpssOperator::build_sepss(sys, 0.5, q1, 2.0, q2s);
  SplittingSet s{sys.a(), SparseMatrix(8, 8), sys.b(), SparseMatrix(4, 8), {}, {}};
  std::tie(s.c_p, s.c_s) = triangular_splitting(sys.c());
  EpssConfig cfg;
  cfg.splitting = s;
  cfg.shifts = {scaled(q1, 0.5), scaled(q2s, 2.0)};
  const Eigen::MatrixXd pf = oracle_preconditioner(sys, cfg);
  std::mt19937_64 rng(1);
  const Eigen::MatrixXd w = epss::testing::gaussian(rng, 12, 2);
  EXPECT_LT(relative_error(apply_columns(op, pf * w), w), 1e-10);
}

TEST(IterationOperator, ScalarHandCase) {
  const SaddleSystem sys = one_by_one();
  const EpssOperator op = EpssOperator::build_sepss(sys, 1.0, scalar(1), 1.0, scalar(1));
  const IterationOperator g = iteration_operator(sys, op);
  const Vector e0 = g.apply(std::vector<double>{1, 0});
  const Vector e1 = g.apply(std::vector<double>{0, 1});
  EXPECT_NEAR(e0[0], -1.0 / 3.0, 1e-15);
  EXPECT_NEAR(e0[1], 0.0, 1e-15);
  EXPECT_NEAR(e1[0], 0.0, 1e-15);
  EXPECT_NEAR(e1[1], 1.0, 1e-15);
}

TEST(IterationOperator, ExactSplittingGivesZero) {
  SparseMatrix a = SparseMatrix::from_dense((DenseMatrix(2, 2) << 2, 1, -1, 2).finished());
  const SaddleSystem sys(a, SparseMatrix::from_dense((DenseMatrix(1, 2) << 1, 1).finished()),
                         SparseMatrix::identity(1, 3.0));
  SplittingSet s;
  std::tie(s.a_p, s.a_s) = hermitian_skew_splitting(a);
  s.b_p = SparseMatrix(1, 2);
  s.b_s = sys.b();
  s.c_p = sys.c();
  s.c_s = SparseMatrix(1, 1);
  const EpssConfig cfg = custom_config(sys, s, {s.a_p, sys.c()});
  const EpssOperator op = EpssOperator::build(sys, cfg);
  const Vector out = iteration_operator(sys, op).apply(std::vector<double>{1, -2, 3});
  for (double v : out) EXPECT_NEAR(v, 0.0, 1e-14);
}

TEST(IterationOperator, MatchesDenseIterationMatrix) {
  std::mt19937_64 rng(41);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const SaddleSystem sys = random_system(seed, {10, 4, true});
    const Preset p = kAllPresets[seed % 10];
    const EpssConfig cfg = preset_config(p, sys, 0.4, 1.3);
    const EpssOperator op = EpssOperator::build(sys, cfg);
    const Eigen::MatrixXd gamma = iteration_matrix_dense(sys, cfg);
    const Eigen::MatrixXd v = epss::testing::gaussian(rng, 14, 1);
    const Vector got = iteration_operator(sys, op).apply(std::span<const double>(v.data(), 14));
    const Eigen::VectorXd ref = gamma * v;
    EXPECT_LT((Eigen::Map<const Eigen::VectorXd>(got.data(), 14) - ref).norm(), 1e-10 * (1 + ref.norm()));
  }
}

TEST(StationarySolve, ZeroRightHandSideConvergesImmediately) {
  const SaddleSystem sys = random_system(1, {5, 2});
  const EpssOperator op = EpssOperator::build(sys, preset_config(Preset::pss, sys, 1.0, 1.0));
  const SolveResult r = stationary_solve(sys, op, Vector(7, 0.0), Vector(7, 0.0), 1e-10, 100);
  EXPECT_TRUE(r.report.converged);
  EXPECT_EQ(r.report.iterations, 0u);
}

TEST(StationarySolve, ScalarCaseContractsByOneThird) {
  const SaddleSystem sys = one_by_one();
  const EpssOperator op = EpssOperator::build_sepss(sys, 1.0, scalar(1), 1.0, scalar(1));
  const Vector b{2.0, 0.0};
  const SolveResult r = stationary_solve(sys, op, b, std::vector<double>{0.0, 5.0}, 1e-12, 200);
  EXPECT_TRUE(r.report.converged);
  EXPECT_NEAR(r.u[0], 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(r.u[1], 5.0);
  const auto& h = r.report.residual_history;
  ASSERT_GE(h.size(), 3u);
  for (std::size_t k = 1; k < h.size() && h[k] > 1e-8; ++k) EXPECT_NEAR(h[k] / h[k - 1], 1.0 / 3.0, 1e-6);
}

TEST(StationarySolve, IterationCapIsNotAnException) {
  const SaddleSystem sys = random_system(2, {8, 3});
  const EpssOperator op = EpssOperator::build(sys, preset_config(Preset::hss, sys, 100.0, 1.0));
  const Vector b = apply_blocks(sys, BlockVector(Vector(8, 1.0), Vector(3, 1.0))).flatten();
  const SolveResult r = stationary_solve(sys, op, b, Vector(11, 0.0), 1e-14, 3);
  EXPECT_FALSE(r.report.converged);
  EXPECT_EQ(r.report.stop_reason, StopReason::max_iters);
  EXPECT_EQ(r.report.iterations, 3u);
}

TEST(NonsingularConvergence, SpectralRadiusBelowOne) {
  const double params[] = {1e-2, 1e-1, 1.0, 10.0};
  for (std::uint64_t k = 0; k < 200; ++k) {
    const SaddleSystem sys = random_system(1000 + k, {6 + k % 10, 2 + k % 5, k % 2 == 0});
    const Preset p = kAllPresets[k % 10];
    const EpssConfig cfg = preset_config(p, sys, params[k % 4], params[(k / 4) % 4]);
    const SpectralReport rep = certify(sys, cfg);
    EXPECT_LE(rep.rho, 1.0 - 1e-10) << to_string(p) << " instance " << k;
  }
}

TEST(BetaParameters, HandCaseBetaStar) {
  // A = I, B = I, alpha = 1, Q1 = Q2 = I, C_P = 0, C_S = [[0, 1], [-1, 0]].
  const SparseMatrix cs = SparseMatrix::from_dense((DenseMatrix(2, 2) << 0, 1, -1, 0).finished());
  const SaddleSystem sys(SparseMatrix::identity(2), SparseMatrix::identity(2), cs);
  const BetaEstimate e =
      beta_star(sys, SparseMatrix(2, 2), cs, 1.0, SparseMatrix::identity(2), SparseMatrix::identity(2));
  EXPECT_FALSE(e.degenerate);
  EXPECT_NEAR(e.value, std::sqrt(0.5), 1e-15);
}

TEST(BetaParameters, HandCaseBetaDoubleStar) {
  const SparseMatrix cs = SparseMatrix::from_dense((DenseMatrix(2, 2) << 0, 1, -1, 0).finished());
  const SaddleSystem sys(SparseMatrix::identity(2), SparseMatrix::identity(2), cs);
  const BetaEstimate e = beta_double_star(sys, SparseMatrix(2, 2), cs, SparseMatrix::identity(2));
  EXPECT_NEAR(e.value, 1.0, 1e-15);
  EXPECT_NEAR(e.radicand, 1.0, 1e-15);
}

TEST(BetaParameters, ZeroSkewPartIsDegenerate) {
  const SaddleSystem sys(SparseMatrix::identity(3), SparseMatrix::from_dense(SparseMatrix::identity(3).to_dense().topRows(2)),
                         SparseMatrix::identity(2));
  EXPECT_TRUE(sepss_beta_star(sys, 1e-4).degenerate);
  EXPECT_EQ(sepss_beta_star(sys, 1e-4).value, 0.0);
  EXPECT_TRUE(sepss_beta_double_star(sys).degenerate);
  EXPECT_EQ(sepss_beta_double_star(sys).value, 0.0);
}

TEST(BetaParameters, MatchDenseFormulas) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const SaddleSystem sys = random_system(500 + seed, {12, 6, true});
    const auto [q1, q2] = diagonal_shift_bases(sys);
    const auto [cp, cs] = triangular_splitting(sys.c());
    const double alpha = 0.01 * double(1 + seed % 7);
    const Eigen::MatrixXd b = dense(sys.b()), q2d = dense(q2), csd = dense(cs), cpd = dense(cp);
    const Eigen::MatrixXd aa = dense(sys.a()) + alpha * dense(q1);
    const Eigen::MatrixXd inner = (b * aa.inverse() * b.transpose() + cpd) * q2d.inverse() * csd;
    const double star = std::sqrt(inner.norm() / q2d.norm());
    const Eigen::MatrixXd q2i = q2d.inverse();
    const double rad = -((b * b.transpose() + cpd.transpose() * cpd) * q2i * csd * csd * q2i).trace() /
                       (q2d * q2d).trace();
    const BetaEstimate s = beta_star(sys, cp, cs, alpha, q1, q2);
    const BetaEstimate d = beta_double_star(sys, cp, cs, q2);
    EXPECT_NEAR(s.value, star, 1e-12 * star);
    EXPECT_NEAR(d.radicand, rad, 1e-12 * std::abs(rad));
    EXPECT_NEAR(d.value, std::pow(rad, 0.25), 1e-12 * std::pow(rad, 0.25));
    EXPECT_GE(d.radicand, -1e-12);
  }
}
