#include <chrono>
#include <string>

#include "epss/errors.hpp"
#include "epss/precond/stationary.hpp"

namespace epss {

SolveResult stationary_solve(const SaddleSystem& sys, const EpssOperator& op,
                             std::span<const double> b, std::span<const double> u0, double tol,
                             std::size_t max_iters) {
  const std::size_t size = sys.size();
  if (b.size() != size || u0.size() != size) {
    throw DimensionError("stationary_solve: vectors must have length " + std::to_string(size));
  }
  const auto start = std::chrono::steady_clock::now();
  SolveResult out;
  out.u.assign(u0.begin(), u0.end());
  auto& rep = out.report;

  const double bnorm = norm2(b);
  const double scale = bnorm > 0.0 ? bnorm : 1.0;
  Vector r(size), correction(size);
  auto residual = [&] {
    apply_full(sys, out.u, r);
    for (std::size_t i = 0; i < size; ++i) r[i] = b[i] - r[i];
    return norm2(r) / scale;
  };

  double rel = residual();
  rep.residual_history.push_back(rel);
  while (rel > tol && rep.iterations < max_iters) {
    op.apply(r, correction);
    axpy(2.0, correction, out.u);
    ++rep.iterations;
    rel = residual();
    rep.residual_history.push_back(rel);
  }
  rep.final_residual = rel;
  rep.converged = rel <= tol;
  rep.stop_reason = rep.converged ? StopReason::tolerance : StopReason::max_iters;
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace epss
