#pragma once

#include <cstddef>
#include <span>

#include "epss/krylov/solve_report.hpp"
#include "epss/precond/operator.hpp"
#include "epss/saddle/system.hpp"

namespace epss {

/// Two-half-step EPSS iteration written as u <- u + 2 P^{-1}(b - A u).
/// Stops when ||b - A u|| / ||b|| <= tol (absolute when b = 0); running out of
/// iterations yields a non-converged report, not an exception.
SolveResult stationary_solve(const SaddleSystem& sys, const EpssOperator& op,
                             std::span<const double> b, std::span<const double> u0, double tol,
                             std::size_t max_iters);

}  // namespace epss
