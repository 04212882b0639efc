#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "epss/linalg/types.hpp"

namespace epss {

enum class StopReason { tolerance, max_iters, max_time, breakdown };

std::string_view to_string(StopReason r);

/// Outcome of a Krylov or stationary run.
struct SolveReport {
  std::size_t iterations = 0;         ///< total inner steps (IT)
  std::vector<double> residual_history;  ///< relative residual after each step
  double final_residual = 0.0;        ///< ||b - A u|| / ||b||, recomputed from A
  std::optional<double> error;        ///< ||e - u|| / ||e|| when e is known
  double wall_time = 0.0;             ///< seconds
  bool converged = false;
  StopReason stop_reason = StopReason::max_iters;
};

struct SolveResult {
  Vector u;
  SolveReport report;
};

}  // namespace epss
