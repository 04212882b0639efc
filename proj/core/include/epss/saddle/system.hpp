#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "epss/linalg/sparse_matrix.hpp"
#include "epss/linalg/types.hpp"

namespace epss {

/// Unknowns [x; y] of a saddle point system, x of length n and y of length m.
struct BlockVector {
  Vector x;
  Vector y;

  BlockVector() = default;
  BlockVector(Vector x_, Vector y_) : x(std::move(x_)), y(std::move(y_)) {}
  BlockVector(std::size_t n, std::size_t m) : x(n, 0.0), y(m, 0.0) {}

  std::size_t size() const noexcept { return x.size() + y.size(); }
  Vector flatten() const;
  static BlockVector split(std::span<const double> u, std::size_t n);
};

/// The system [[A, B^T], [-B, C]] [x; y] = [f; g] with A (n x n), B (m x n),
/// C (m x m) and m <= n. B is stored unsigned; the minus sign of the (2,1)
/// block is applied by every consumer.
class SaddleSystem {
 public:
  SaddleSystem(SparseMatrix a, SparseMatrix b, SparseMatrix c);

  const SparseMatrix& a() const noexcept { return a_; }
  const SparseMatrix& b() const noexcept { return b_; }
  const SparseMatrix& c() const noexcept { return c_; }
  std::size_t n() const noexcept { return a_.rows(); }
  std::size_t m() const noexcept { return c_.rows(); }
  std::size_t size() const noexcept { return n() + m(); }

 private:
  SparseMatrix a_;
  SparseMatrix b_;
  SparseMatrix c_;
};

SparseMatrix assemble_full(const SaddleSystem& sys);

BlockVector apply_blocks(const SaddleSystem& sys, const BlockVector& u);
/// Flat variant of apply_blocks: out = [A x + B^T y; -B x + C y].
void apply_full(const SaddleSystem& sys, std::span<const double> u, std::span<double> out);

struct SystemDiagnostics {
  bool a_positive_definite = false;
  bool c_positive_semidefinite = false;
  /// The remaining fields need the dense path (n + m <= 2000).
  bool dense_checked = false;
  std::size_t rank_b = 0;
  std::size_t null_dim_c_sym = 0;   ///< dim null(C + C^T)
  std::size_t null_dim_bt_c = 0;    ///< dim(null(B^T) ∩ null(C))
  /// With A PD and C PSD the system is singular exactly when
  /// null(B^T) ∩ null(C) is nontrivial.
  bool singular = false;

  bool b_rank_deficient(std::size_t m) const { return rank_b < m; }
};

/// Never throws for well-formed systems; it reports.
SystemDiagnostics validate(const SaddleSystem& sys, double rank_tol = 1e-10);

}  // namespace epss
