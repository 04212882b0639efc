#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

#include "epss/saddle/system.hpp"

namespace epss {

enum class WindField {
  recirculating,  ///< w = (2y(1 - x^2), -2x(1 - y^2)), divergence free, zero normal flux
  none,           ///< pure diffusion (Stokes-like velocity block)
};

std::string_view to_string(WindField w);

struct OseenSpec {
  std::size_t grid = 16;  ///< q x q cells on [-1, 1]^2, q >= 4
  double viscosity = 0.01;
  WindField wind = WindField::recirculating;
  double stabilization = 0.25;  ///< C = stabilization * h^2 * (patch Laplacian)
};

/// Oseen-type saddle point system on a uniform q x q grid.
///
/// Velocities live on the (q+1)^2 grid nodes, ordered all first components
/// then all second components with node (i, j) at j (q+1) + i. Pressures are
/// one per cell, cell (i, j) at j q + i. A is the bilinear-element diffusion
/// plus convection operator (2x2 Gauss quadrature, exact for this wind) with
/// identity rows for boundary nodes, B = -(q, div u) without boundary
/// columns, and C a scaled graph Laplacian over 2x2 cell patches. The
/// result has n = 2 (q+1)^2, m = q^2, A positive definite, C symmetric
/// positive semidefinite and the constant pressure in null(B^T) ∩ null(C).
SaddleSystem gen_oseen(const OseenSpec& spec);

struct SyntheticSpec {
  std::size_t n = 20;
  std::size_t m = 10;
  std::size_t rank_b = 10;
  std::size_t null_c = 0;  ///< dim null(C)
  /// dim(null(B^T) ∩ null(C)); the system is singular iff this is > 0.
  /// Defaults (when negative) to min(null_c, m - rank_b).
  std::ptrdiff_t null_common = -1;
  std::uint64_t seed = 1;
  double shift = 1.0;       ///< delta in A = G^T G + delta I + K
  double skew_scale = 1.0;  ///< size of K
};

/// Dense random instance: A = G^T G + delta I + K (K skew), C = V diag(d) V^T
/// with `null_c` zero entries in d, B of rank `rank_b`. Deterministic in the
/// seed. Throws std::invalid_argument for infeasible rank requests.
SaddleSystem gen_synthetic_singular(const SyntheticSpec& spec);

/// b = A e with e the all-ones vector; consistent even for singular systems.
BlockVector rhs_from_ones(const SaddleSystem& sys);

}  // namespace epss
