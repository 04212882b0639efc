#pragma once

#include <memory>
#include <span>
#include <stdexcept>
#include <string>

#include "epss/linalg/lu.hpp"
#include "epss/precond/config.hpp"
#include "epss/saddle/system.hpp"

namespace epss {

/// Building a preconditioner failed; `stage()` names the sub-system.
class PreconditionerError : public std::runtime_error {
 public:
  PreconditionerError(std::string stage, const std::string& what)
      : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

/// Applies y = P^{-1} x for P = (Sigma + P)(Sigma^{-1})(Sigma + S).
///
/// Generic mode keeps LU factors of the two shifted (n+m) operators. SEPSS
/// mode keeps the factored form with a forward-substitution operator
/// C_P + P_beta, the LU of N = A + P_alpha + B^T (C_P + P_beta)^{-1} B and the
/// LU of C_S + P_beta, and applies it with the five-step block solve.
/// Immutable after construction; apply() may run concurrently.
class EpssOperator {
 public:
  enum class Mode { generic, sepss };

  static EpssOperator build_generic(const SaddleSystem& sys, const EpssConfig& cfg);
  static EpssOperator build_sepss(const SaddleSystem& sys, double alpha, const SparseMatrix& q1,
                                  double beta, const SparseMatrix& q2);
  /// SEPSS-preset configs take the SEPSS path, all others the generic one.
  static EpssOperator build(const SaddleSystem& sys, const EpssConfig& cfg);

  Mode mode() const noexcept { return mode_; }
  std::size_t n() const noexcept { return n_; }
  std::size_t m() const noexcept { return m_; }
  std::size_t size() const noexcept { return n_ + m_; }

  void apply(std::span<const double> x, std::span<double> y) const;
  BlockVector apply(const BlockVector& x) const;

  /// The explicitly formed N of SEPSS mode (empty in generic mode).
  const SparseMatrix& schur() const noexcept { return schur_; }

 private:
  EpssOperator() = default;

  void apply_generic(std::span<const double> x, std::span<double> y) const;
  void apply_sepss(std::span<const double> x, std::span<double> y) const;
  void solve_cp(std::span<double> r) const;

  Mode mode_ = Mode::generic;
  std::size_t n_ = 0;
  std::size_t m_ = 0;

  // generic
  std::shared_ptr<const LuFactors> sigma_plus_p_;
  std::shared_ptr<const LuFactors> sigma_plus_s_;
  SparseMatrix sigma_;

  // sepss
  SparseMatrix cp_shifted_;                       // C_P + P_beta
  bool cp_triangular_ = false;
  std::shared_ptr<const LuFactors> cp_lu_;        // when P_beta is not diagonal
  std::shared_ptr<const LuFactors> schur_lu_;
  std::shared_ptr<const LuFactors> cs_lu_;        // C_S + P_beta
  SparseMatrix b_;
  SparseMatrix p_beta_;
  SparseMatrix schur_;
};

/// Matrix-free Gamma v = v - 2 P^{-1} A v.
class IterationOperator {
 public:
  IterationOperator(const SaddleSystem& sys, const EpssOperator& op) : sys_(&sys), op_(&op) {}
  void apply(std::span<const double> v, std::span<double> out) const;
  Vector apply(std::span<const double> v) const;

 private:
  const SaddleSystem* sys_;
  const EpssOperator* op_;
};

inline IterationOperator iteration_operator(const SaddleSystem& sys, const EpssOperator& op) {
  return {sys, op};
}

}  // namespace epss
