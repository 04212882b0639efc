#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "epss/analysis/certify.hpp"
#include "epss/errors.hpp"
#include "epss/problems/generators.hpp"
#include "random_systems.hpp"

using namespace epss;
using epss::testing::dense_saddle;
using epss::testing::random_system;
using epss::testing::relative_error;

namespace {

SparseMatrix scalar(double v) { return SparseMatrix::from_dense(DenseMatrix::Constant(1, 1, v)); }

SparseMatrix diag(std::initializer_list<double> d) {
  return SparseMatrix::diagonal(std::vector<double>(d));
}

SparseMatrix skew2() {
  return SparseMatrix::from_dense((DenseMatrix(2, 2) << 0, 1, -1, 0).finished());
}

std::vector<double> sorted_real(const ComplexSpectrum& s) {
  std::vector<double> out;
  for (const auto& z : s) out.push_back(z.real());
  std::sort(out.begin(), out.end());
  return out;
}

// A = 2I, B = B_P + B_S with the given coupling blocks, C = 0, unit shifts.
EpssConfig coupled_config(const SaddleSystem& sys, const SparseMatrix& bp, const SparseMatrix& bs) {
  SplittingSet s{sys.a(), SparseMatrix(2, 2), bp, bs, SparseMatrix(2, 2), SparseMatrix(2, 2)};
  return custom_config(sys, s, {SparseMatrix::identity(2), SparseMatrix::identity(2)});
}

}  // namespace

TEST(IterationMatrix, ScalarHandCase) {
  const SaddleSystem sys(scalar(2), SparseMatrix(1, 1), SparseMatrix(1, 1));
  const EpssConfig cfg = preset_config(Preset::pss, sys, 1.0, 1.0);
  const DenseMatrix g = iteration_matrix_dense(sys, cfg);
  EXPECT_NEAR(g(0, 0), -1.0 / 3.0, 1e-15);
  EXPECT_NEAR(g(1, 1), 1.0, 1e-15);
  EXPECT_NEAR(g(0, 1), 0.0, 1e-15);
  EXPECT_NEAR(g(1, 0), 0.0, 1e-15);
  const SpectralReport rep = certify_iteration_matrix(g);
  EXPECT_EQ(rep.unit_count, 1u);
  EXPECT_NEAR(rep.nu, 1.0 / 3.0, 1e-15);
  EXPECT_TRUE(rep.index_one);
  EXPECT_TRUE(rep.semi_convergent);
}

TEST(IterationMatrix, CayleyTransformSpectrum) {
  const SaddleSystem sys(diag({1, 2, 3}), SparseMatrix(1, 3), scalar(1));
  for (double alpha : {0.1, 1.0, 5.0}) {
    const SpectralReport rep = certify(sys, preset_config(Preset::pss, sys, alpha, alpha));
    std::vector<double> expected;
    for (double mu : {1.0, 2.0, 3.0, 1.0}) expected.push_back((alpha - mu) / (alpha + mu));
    std::sort(expected.begin(), expected.end());
    const std::vector<double> got = sorted_real(rep.spectrum);
    ASSERT_EQ(got.size(), 4u);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(got[i], expected[i], 1e-13);
  }
}

TEST(IterationMatrix, HugeShiftsApproachIdentity) {
  const SaddleSystem sys = random_system(11, {8, 3});
  const DenseMatrix g = iteration_matrix_dense(sys, preset_config(Preset::gpss, sys, 1e8, 1e8));
  EXPECT_LT((g - DenseMatrix::Identity(11, 11)).norm(), 1e-6);
}

TEST(IterationMatrix, ThreeFormsAgree) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const SaddleSystem sys = random_system(seed, {8 + seed % 6, 3 + seed % 4});
    const EpssConfig cfg = preset_config(kAllPresets[seed % 10], sys, 0.2, 3.0);
    const DenseMatrix g1 = iteration_matrix_product(sys, cfg);
    EXPECT_LT(relative_error(iteration_matrix_preconditioned(sys, cfg), g1), 1e-10);
    EXPECT_LT(relative_error(iteration_matrix_mn(sys, cfg), g1), 1e-10);
  }
}

TEST(IterationMatrix, ExplicitFormulaIndependentOfLibrary) {
  const SaddleSystem sys = random_system(12, {7, 3, false});
  const EpssConfig cfg = preset_config(Preset::hss, sys, 0.7, 0.7);
  const Eigen::MatrixXd a = dense_saddle(sys);
  const Eigen::MatrixXd h = 0.5 * (a + a.transpose());
  const Eigen::MatrixXd s = 0.5 * (a - a.transpose());
  const Eigen::MatrixXd i = Eigen::MatrixXd::Identity(10, 10);
  const Eigen::MatrixXd ref = (0.7 * i + s).inverse() * (0.7 * i - h) * (0.7 * i + h).inverse() * (0.7 * i - s);
  EXPECT_LT(relative_error(iteration_matrix_dense(sys, cfg), ref), 1e-12);
}

TEST(Preconditioner, BlockFormulaMatchesProduct) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const SaddleSystem sys = random_system(100 + seed, {9, 4});
    const EpssConfig cfg = preset_config(kAllPresets[seed % 10], sys, 0.5, 2.0);
    EXPECT_LT(relative_error(preconditioner_blocks(sys, cfg), preconditioner_product(sys, cfg)), 1e-12);
  }
}

TEST(Preconditioner, SepssFactoredFormMatchesProduct) {
  const SaddleSystem sys = random_system(13, {10, 5});
  const EpssConfig cfg = preset_config(Preset::sepss, sys, 0.3, 1.2);
  EXPECT_LT(relative_error(sepss_preconditioner_factored(sys, cfg), preconditioner_product(sys, cfg)),
            1e-12);
}

TEST(Certify, JordanBlockIsNotIndexOne) {
  const DenseMatrix g = (DenseMatrix(2, 2) << 1, 1, 0, 1).finished();
  const SpectralReport rep = certify_iteration_matrix(g);
  EXPECT_EQ(rep.unit_count, 2u);
  EXPECT_EQ(rep.rank_i_minus_gamma, 1u);
  EXPECT_EQ(rep.rank_i_minus_gamma_sq, 0u);
  EXPECT_FALSE(rep.index_one);
  EXPECT_FALSE(rep.semi_convergent);
}

TEST(Certify, UnitModulusPairBlocksConvergence) {
  const DenseMatrix g = (DenseMatrix(3, 3) << 0, 1, 0, -1, 0, 0, 0, 0, 1).finished();
  const SpectralReport rep = certify_iteration_matrix(g);
  EXPECT_NEAR(rep.nu, 1.0, 1e-14);
  EXPECT_TRUE(rep.index_one);
  EXPECT_FALSE(rep.semi_convergent);
}

TEST(Certify, RejectsNonSquare) {
  EXPECT_THROW((void)certify_iteration_matrix(DenseMatrix::Zero(2, 3)), DimensionError);
}

TEST(Certify, SingularSyntheticInstance) {
  const SaddleSystem sys = gen_synthetic_singular({.n = 16, .m = 8, .rank_b = 6, .null_c = 3, .seed = 4});
  const EpssConfig cfg = preset_config(Preset::sepss, sys, 0.1, 1.0);
  const SpectralReport rep = certify(sys, cfg);
  EXPECT_TRUE(rep.has_unit_eigenvalue);
  EXPECT_LT(rep.nu, 1.0);
  EXPECT_TRUE(rep.index_one);
  const DenseMatrix v = unit_eigenvectors(iteration_matrix_dense(sys, cfg));
  ASSERT_GT(v.cols(), 0);
  const Eigen::MatrixXd av = dense_saddle(sys) * Eigen::MatrixXd(v);
  for (Eigen::Index j = 0; j < v.cols(); ++j) EXPECT_LE(av.col(j).norm(), 1e-8);
}

TEST(Certify, SkewCGivesUnitModulusSpectrum) {
  const SaddleSystem sys(SparseMatrix::identity(2), SparseMatrix(2, 2), skew2());
  const EpssConfig cfg = preset_config(Preset::pss, sys, 1.0, 1.0);
  const SpectralReport rep = certify(sys, cfg);
  EXPECT_NEAR(rep.nu, 1.0, 1e-12);
  EXPECT_FALSE(rep.semi_convergent);
  const TheoremCheck tc = theorem_condition_check(sys, cfg, rep);
  EXPECT_EQ(tc.unit_modulus, 2u);
  EXPECT_EQ(tc.pairs_tested, 4u);
  EXPECT_FALSE(corollary_check(sys, cfg).null_contained);
}

TEST(TheoremCheck, VacuousWithoutUnitModulusEigenvalues) {
  const SaddleSystem sys = random_system(14, {8, 4});
  const EpssConfig cfg = preset_config(Preset::sepss, sys, 0.5, 1.0);
  const TheoremCheck tc = theorem_condition_check(sys, cfg, certify(sys, cfg));
  EXPECT_EQ(tc.unit_modulus, 0u);
  EXPECT_EQ(tc.pairs_tested, 0u);
  EXPECT_TRUE(tc.passes());
}

TEST(Corollary, PositiveDefiniteCIsTrivial) {
  const SaddleSystem sys = random_system(15, {6, 3, false});
  const CorollaryReport rep = corollary_check(sys, preset_config(Preset::gss, sys, 1.0, 1.0));
  EXPECT_EQ(rep.null_basis.cols(), 0);
  EXPECT_TRUE(rep.null_contained);
  EXPECT_TRUE(rep.condition1 && rep.condition2 && rep.condition3 && rep.condition4);
  EXPECT_TRUE(rep.semi_convergent());
}

TEST(Corollary, SepssHasZeroCouplingBlock) {
  const SaddleSystem sys = gen_synthetic_singular({.n = 12, .m = 6, .rank_b = 4, .null_c = 3, .seed = 2});
  const CorollaryReport rep = corollary_check(sys, preset_config(Preset::sepss, sys, 0.1, 1.0));
  EXPECT_EQ(rep.null_basis.cols(), 3);
  EXPECT_TRUE(rep.condition4);
  EXPECT_TRUE(rep.semi_convergent());
  for (double v : rep.coupling_form) EXPECT_EQ(v, 0.0);
}

TEST(Corollary, IndefiniteDifferenceFailsFirstCondition) {
  const SaddleSystem sys(SparseMatrix::identity(2, 2.0), diag({3, 1}), SparseMatrix(2, 2));
  const CorollaryReport rep = corollary_check(sys, coupled_config(sys, SparseMatrix::identity(2), diag({2, 0})));
  ASSERT_EQ(rep.null_basis.cols(), 2);
  for (std::size_t j = 0; j < 2; ++j) EXPECT_NE(rep.shift_form[j], rep.coupling_form[j]);
  EXPECT_FALSE(rep.condition1);
  EXPECT_FALSE(rep.condition2);
  EXPECT_FALSE(rep.condition3);
  EXPECT_FALSE(rep.condition4);
  EXPECT_FALSE(rep.semi_convergent());
}

TEST(Corollary, NegativeCouplingSatisfiesSecondCondition) {
  const SaddleSystem sys(SparseMatrix::identity(2, 2.0), SparseMatrix(2, 2), SparseMatrix(2, 2));
  const CorollaryReport rep =
      corollary_check(sys, coupled_config(sys, SparseMatrix::identity(2), SparseMatrix::identity(2, -1.0)));
  EXPECT_TRUE(rep.condition2);
  EXPECT_TRUE(rep.semi_convergent());
}

TEST(Corollary, SkewCBreaksNullContainment) {
  const SaddleSystem sys(SparseMatrix::identity(2), SparseMatrix(2, 2), skew2());
  const CorollaryReport rep = corollary_check(sys, preset_config(Preset::pss, sys, 1.0, 1.0));
  EXPECT_FALSE(rep.null_contained);
  EXPECT_FALSE(rep.semi_convergent());
}

TEST(DenseGuard, RefusesLargeSystems) {
  const SaddleSystem sys(SparseMatrix::identity(1500), SparseMatrix(600, 1500), SparseMatrix::identity(600));
  EXPECT_THROW((void)dense_splitting(sys, preset_config(Preset::pss, sys, 1.0, 1.0)), DimensionError);
}
