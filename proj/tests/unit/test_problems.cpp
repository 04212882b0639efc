#include <gtest/gtest.h>

#include <bit>
#include <filesystem>
#include <random>
#include <sstream>

#include "epss/errors.hpp"
#include "epss/problems/generators.hpp"
#include "epss/problems/matrix_market.hpp"
#include "epss/saddle/splitting.hpp"
#include "random_systems.hpp"

using namespace epss;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("epss_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::size_t parse_error_line(const std::string& text) {
  std::istringstream in(text);
  try {
    (void)read_matrix_market(in);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST(Oseen, ReferenceSizesAtGrid16) {
  const SaddleSystem sys = gen_oseen({});
  EXPECT_EQ(sys.n(), 578u);
  EXPECT_EQ(sys.m(), 256u);
  EXPECT_EQ(sys.a().nnz(), 3826u);
  EXPECT_EQ(sys.b().nnz(), 1800u);
  EXPECT_EQ(sys.c().nnz(), 768u);
}

TEST(Oseen, StructuralProperties) {
  const SaddleSystem sys = gen_oseen({.grid = 8});
  const SystemDiagnostics d = validate(sys);
  EXPECT_TRUE(d.a_positive_definite);
  EXPECT_TRUE(d.c_positive_semidefinite);
  EXPECT_TRUE(d.singular);
  EXPECT_TRUE(d.b_rank_deficient(sys.m()));
  EXPECT_FALSE(is_symmetric(sys.a(), 1e-12));
  EXPECT_TRUE(is_symmetric(sys.c()));
}

TEST(Oseen, ConstantPressureIsInTheCommonNullSpace) {
  const SaddleSystem sys = gen_oseen({.grid = 12});
  const Vector ones(sys.m(), 1.0);
  Vector bt(sys.n()), c(sys.m());
  sys.b().multiply_transpose(ones, bt);
  sys.c().multiply(ones, c);
  for (double v : bt) EXPECT_NEAR(v, 0.0, 1e-14);
  for (double v : c) EXPECT_NEAR(v, 0.0, 1e-14);
}

TEST(Oseen, DivergenceOfConstantFieldVanishesInside) {
  const std::size_t q = 10, nodes = (q + 1) * (q + 1);
  const SaddleSystem sys = gen_oseen({.grid = q});
  Vector u(sys.n(), 0.0), div(sys.m());
  for (std::size_t k = 0; k < nodes; ++k) u[k] = 1.0;
  sys.b().multiply(u, div);
  for (std::size_t j = 1; j + 1 < q; ++j) {
    for (std::size_t i = 1; i + 1 < q; ++i) EXPECT_NEAR(div[j * q + i], 0.0, 1e-14);
  }
}

TEST(Oseen, ConvectionFadesAtHighViscosity) {
  const SaddleSystem with = gen_oseen({.grid = 8, .viscosity = 1e6});
  const SaddleSystem without = gen_oseen({.grid = 8, .viscosity = 1e6, .wind = WindField::none});
  const double diff = frobenius_norm(add(with.a(), without.a(), 1.0, -1.0));
  EXPECT_LE(diff / frobenius_norm(without.a()), 1e-4);
  EXPECT_EQ(with.b(), without.b());
  EXPECT_EQ(with.c(), without.c());
}

TEST(Oseen, RejectsTinyGrid) {
  EXPECT_THROW((void)gen_oseen({.grid = 3}), std::invalid_argument);
  EXPECT_THROW((void)gen_oseen({.grid = 8, .viscosity = 0.0}), std::invalid_argument);
}

TEST(Synthetic, FullRankIsNonsingular) {
  const SaddleSystem sys = gen_synthetic_singular({.n = 20, .m = 10, .rank_b = 10, .null_c = 0});
  const SystemDiagnostics d = validate(sys);
  EXPECT_TRUE(d.a_positive_definite);
  EXPECT_TRUE(d.c_positive_semidefinite);
  EXPECT_EQ(d.rank_b, 10u);
  EXPECT_FALSE(d.singular);
}

TEST(Synthetic, RequestedNullSpaces) {
  const SaddleSystem sys = gen_synthetic_singular({.n = 20, .m = 10, .rank_b = 8, .null_c = 2});
  const SystemDiagnostics d = validate(sys);
  EXPECT_EQ(d.rank_b, 8u);
  EXPECT_EQ(d.null_dim_c_sym, 2u);
  EXPECT_EQ(d.null_dim_bt_c, 2u);
  EXPECT_TRUE(d.singular);
}

TEST(Synthetic, NullCommonCanBeSmaller) {
  const SaddleSystem sys =
      gen_synthetic_singular({.n = 20, .m = 10, .rank_b = 7, .null_c = 3, .null_common = 1});
  const SystemDiagnostics d = validate(sys);
  EXPECT_EQ(d.null_dim_bt_c, 1u);
}

TEST(Synthetic, DeterministicInSeed) {
  const SyntheticSpec spec{.n = 15, .m = 7, .rank_b = 5, .null_c = 2, .seed = 9};
  const SaddleSystem a = gen_synthetic_singular(spec), b = gen_synthetic_singular(spec);
  EXPECT_EQ(a.a(), b.a());
  EXPECT_EQ(a.b(), b.b());
  EXPECT_EQ(a.c(), b.c());
  SyntheticSpec other = spec;
  other.seed = 10;
  EXPECT_NE(gen_synthetic_singular(other).a(), a.a());
}

TEST(Synthetic, RejectsInfeasibleRequests) {
  EXPECT_THROW((void)gen_synthetic_singular({.n = 5, .m = 6}), std::invalid_argument);
  EXPECT_THROW((void)gen_synthetic_singular({.n = 10, .m = 5, .rank_b = 6}), std::invalid_argument);
  EXPECT_THROW((void)gen_synthetic_singular({.n = 10, .m = 5, .rank_b = 5, .null_c = 6}),
               std::invalid_argument);
}

TEST(RhsFromOnes, Cases) {
  const SaddleSystem id(SparseMatrix::identity(2), SparseMatrix(1, 2), SparseMatrix::identity(1));
  EXPECT_EQ(rhs_from_ones(id).flatten(), (Vector{1, 1, 1}));
  const auto one = [](double v) { return SparseMatrix::from_dense(DenseMatrix::Constant(1, 1, v)); };
  const SaddleSystem s(one(2), one(1), one(1));
  EXPECT_EQ(rhs_from_ones(s).flatten(), (Vector{3, 0}));
}

TEST(MatrixMarket, ReadsIdentity) {
  std::istringstream in(
      "%%MatrixMarket matrix coordinate real general\n% comment\n3 3 3\n1 1 1\n2 2 1\n3 3 1\n");
  EXPECT_EQ(read_matrix_market(in), SparseMatrix::identity(3));
}

TEST(MatrixMarket, ExpandsSymmetricStorage) {
  std::istringstream in("%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 1 4\n2 1 -1\n");
  const SparseMatrix a = read_matrix_market(in);
  EXPECT_EQ(a.coeff(0, 1), -1.0);
  EXPECT_EQ(a.coeff(1, 0), -1.0);
  EXPECT_EQ(a.nnz(), 3u);
}

TEST(MatrixMarket, RoundTripIsBitExact) {
  std::mt19937_64 rng(77);
  for (int k = 0; k < 50; ++k) {
    const SparseMatrix a = epss::testing::random_sparse(rng, 1 + k % 13, 1 + k % 7, 0.4);
    std::stringstream buf;
    write_matrix_market(a, buf);
    const SparseMatrix b = read_matrix_market(buf);
    ASSERT_EQ(a.rows(), b.rows());
    ASSERT_TRUE(std::equal(a.row_ptr().begin(), a.row_ptr().end(), b.row_ptr().begin()));
    ASSERT_TRUE(std::equal(a.col_idx().begin(), a.col_idx().end(), b.col_idx().begin()));
    for (std::size_t i = 0; i < a.nnz(); ++i) {
      EXPECT_EQ(std::bit_cast<std::uint64_t>(a.values()[i]), std::bit_cast<std::uint64_t>(b.values()[i]));
    }
  }
}

TEST(MatrixMarket, ErrorsCarryLineNumbers) {
  EXPECT_EQ(parse_error_line("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n"), 3u);
  EXPECT_EQ(parse_error_line("%%MatrixMarket matrix array real general\n2 2\n"), 1u);
  EXPECT_EQ(parse_error_line("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n"), 4u);
  EXPECT_EQ(parse_error_line("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 abc\n"), 3u);
  EXPECT_EQ(parse_error_line(""), 1u);
}

TEST(MatrixMarket, MalformedCorpusIsRejected) {
  std::size_t count = 0;
  for (const auto& entry : fs::directory_iterator(fs::path(EPSS_TEST_DATA_DIR) / "malformed")) {
    ++count;
    try {
      (void)read_matrix_market(entry.path());
      ADD_FAILURE() << entry.path() << " was accepted";
    } catch (const ParseError& e) {
      EXPECT_GT(e.line(), 0u) << entry.path();
    }
  }
  EXPECT_EQ(count, 10u);
}

TEST(MatrixMarket, SystemManifestRoundTrip) {
  const fs::path dir = scratch_dir("manifest");
  const SaddleSystem sys = gen_synthetic_singular({.n = 9, .m = 4, .rank_b = 3, .null_c = 1});
  write_system(sys, dir, "synthetic test system");
  EXPECT_TRUE(fs::exists(dir / "A.mtx"));
  const SaddleSystem back = read_system(dir / "manifest.json");
  EXPECT_EQ(back.a(), sys.a());
  EXPECT_EQ(back.b(), sys.b());
  EXPECT_EQ(back.c(), sys.c());
  fs::remove_all(dir);
}

TEST(MatrixMarket, MissingFileThrows) {
  EXPECT_ANY_THROW((void)read_matrix_market(fs::path("/nonexistent/none.mtx")));
}
