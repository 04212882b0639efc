#pragma once

#include <cstddef>
#include <memory>
#include <span>

#include "epss/linalg/sparse_matrix.hpp"
#include "epss/linalg/types.hpp"

namespace epss {

enum class LuBackend {
  automatic,  ///< dense below `kDenseLuCutoff`, sparse above
  dense,      ///< partial pivoting on a dense copy
  sparse,     ///< AMD ordering on A + A^T, threshold partial pivoting
};

inline constexpr std::size_t kDenseLuCutoff = 160;
inline constexpr std::size_t kDenseLuLimit = 5000;
/// Pivots below this fraction of max|a_ij| are treated as zero.
inline constexpr double kSingularPivotTol = 1e-14;

/// LU factors with their permutations. Read-only after construction and
/// cheap to copy (the factor storage is shared).
class LuFactors {
 public:
  static LuFactors factor(const DenseMatrix& a);
  static LuFactors factor(const SparseMatrix& a, LuBackend backend = LuBackend::automatic);

  std::size_t order() const noexcept;
  bool is_sparse() const noexcept;

  void solve_in_place(std::span<double> rhs) const;
  Vector solve(std::span<const double> rhs) const;
  /// Column-wise solve with a dense right-hand side block.
  DenseMatrix solve(const DenseMatrix& rhs) const;

  class Impl;

 private:
  explicit LuFactors(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

inline LuFactors lu_factor(const DenseMatrix& a) { return LuFactors::factor(a); }
inline LuFactors lu_factor(const SparseMatrix& a, LuBackend backend = LuBackend::automatic) {
  return LuFactors::factor(a, backend);
}

/// Forward (lower) or backward (upper) substitution in O(nnz).
/// Throws SingularMatrixError naming the row of a missing/zero diagonal and
/// std::invalid_argument if T has entries on the wrong side of the diagonal.
Vector triangular_solve(const SparseMatrix& t, std::span<const double> r, bool lower);
void triangular_solve_in_place(const SparseMatrix& t, std::span<double> r, bool lower);

/// T^{-1} B for lower-triangular T, row by row with a sparse accumulator.
SparseMatrix lower_triangular_solve(const SparseMatrix& t, const SparseMatrix& b);

}  // namespace epss
