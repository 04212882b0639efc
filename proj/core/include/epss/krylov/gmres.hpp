#pragma once

#include <cstddef>
#include <functional>
#include <span>

#include "epss/krylov/solve_report.hpp"
#include "epss/saddle/system.hpp"

namespace epss {

/// out = Op(in); `in` and `out` never alias.
using LinearMap = std::function<void(std::span<const double> in, std::span<double> out)>;

/// Preconditioner allowed to change between inner steps. `step` is the
/// zero-based global inner-step index.
using FlexiblePreconditioner =
    std::function<void(std::size_t step, std::span<const double> in, std::span<double> out)>;

struct SolveOptions {
  std::size_t restart = 20;
  double rel_tol = 1e-9;
  std::size_t max_iters = 1000;  ///< total inner steps
  double max_time = 1000.0;      ///< seconds
};

/// Restarted GMRES with right preconditioning (solves A M^{-1} w = b,
/// u = u0 + M^{-1} V y). Arnoldi uses modified Gram-Schmidt with a second pass
/// when cancellation is detected; the least-squares problem is updated with
/// Givens rotations. The per-step residual estimate drives early exit inside a
/// cycle, the true residual ||b - A u|| / ||b|| decides convergence.
/// An empty `precond` means no preconditioning.
SolveResult gmres(const LinearMap& a, const LinearMap& precond, std::span<const double> b,
                  std::span<const double> u0, const SolveOptions& opts = {});

/// Flexible GMRES: stores the preconditioned directions Z and updates
/// u = u0 + Z y. With a fixed preconditioner it reproduces gmres().
SolveResult fgmres(const LinearMap& a, const FlexiblePreconditioner& precond,
                   std::span<const double> b, std::span<const double> u0,
                   const SolveOptions& opts = {});

/// ||b - A u|| / ||b|| for the full saddle point operator (absolute if b = 0).
double relative_residual(const SaddleSystem& sys, std::span<const double> u,
                         std::span<const double> b);

/// Residual-based acceptance. For singular systems solutions differ by null
/// space components, so comparing against a reference solution is meaningless.
bool singular_solve_check(const SaddleSystem& sys, std::span<const double> u,
                          std::span<const double> b, double tol = 1e-9);

}  // namespace epss
