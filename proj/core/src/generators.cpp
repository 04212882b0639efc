#include "epss/problems/generators.hpp"

#include <array>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/QR>

#include "epss/linalg/spectral.hpp"

namespace epss {

std::string_view to_string(WindField w) {
  return w == WindField::none ? "none" : "recirculating";
}

namespace {

struct Wind {
  WindField kind;
  std::array<double, 2> at(double x, double y) const {
    if (kind == WindField::none) return {0.0, 0.0};
    return {2.0 * y * (1.0 - x * x), -2.0 * x * (1.0 - y * y)};
  }
};

// Local corners (0,0), (1,0), (1,1), (0,1) of the reference cell.
constexpr std::array<int, 4> kCornerX{0, 1, 1, 0};
constexpr std::array<int, 4> kCornerY{0, 0, 1, 1};

double shape(int a, double xi, double eta) {
  const double fx = kCornerX[a] ? xi : 1.0 - xi;
  const double fy = kCornerY[a] ? eta : 1.0 - eta;
  return fx * fy;
}

std::array<double, 2> shape_grad(int a, double xi, double eta, double h) {
  const double fx = kCornerX[a] ? xi : 1.0 - xi;
  const double fy = kCornerY[a] ? eta : 1.0 - eta;
  const double dx = kCornerX[a] ? 1.0 : -1.0;
  const double dy = kCornerY[a] ? 1.0 : -1.0;
  return {dx * fy / h, fx * dy / h};
}

// Cell patches for the stabilization: pairs of cells per direction, with a
// single leftover cell when q is odd.
std::size_t patch_of(std::size_t i, std::size_t q) {
  const std::size_t p = i / 2;
  return std::min(p, (q - 1) / 2);
}

}  // namespace

SaddleSystem gen_oseen(const OseenSpec& spec) {
  const std::size_t q = spec.grid;
  if (q < 4) throw std::invalid_argument("gen_oseen: grid must be at least 4");
  if (!(spec.viscosity > 0.0)) throw std::invalid_argument("gen_oseen: viscosity must be > 0");
  if (!(spec.stabilization >= 0.0)) {
    throw std::invalid_argument("gen_oseen: stabilization must be >= 0");
  }
  const std::size_t nodes_1d = q + 1;
  const std::size_t nodes = nodes_1d * nodes_1d;
  const std::size_t n = 2 * nodes;
  const std::size_t m = q * q;
  const double h = 2.0 / static_cast<double>(q);
  const Wind wind{spec.wind};

  auto node = [&](std::size_t i, std::size_t j) { return j * nodes_1d + i; };
  auto on_boundary = [&](std::size_t i, std::size_t j) {
    return i == 0 || j == 0 || i == q || j == q;
  };

  const double g = 0.5 / std::sqrt(3.0);
  const std::array<double, 2> gauss{0.5 - g, 0.5 + g};

  std::vector<Triplet> a_entries;
  std::vector<Triplet> b_entries;
  a_entries.reserve(2 * 16 * m + n);
  b_entries.reserve(8 * m);

  for (std::size_t cj = 0; cj < q; ++cj) {
    for (std::size_t ci = 0; ci < q; ++ci) {
      const double x0 = -1.0 + static_cast<double>(ci) * h;
      const double y0 = -1.0 + static_cast<double>(cj) * h;
      std::array<std::size_t, 4> ids{};
      std::array<bool, 4> interior{};
      for (int a = 0; a < 4; ++a) {
        const std::size_t i = ci + kCornerX[a], j = cj + kCornerY[a];
        ids[a] = node(i, j);
        interior[a] = !on_boundary(i, j);
      }

      std::array<std::array<double, 4>, 4> elem{};
      for (double xi : gauss) {
        for (double eta : gauss) {
          const double w = 0.25 * h * h;
          const auto vel = wind.at(x0 + xi * h, y0 + eta * h);
          for (int a = 0; a < 4; ++a) {
            const double phi_a = shape(a, xi, eta);
            const auto ga = shape_grad(a, xi, eta, h);
            for (int b = 0; b < 4; ++b) {
              const auto gb = shape_grad(b, xi, eta, h);
              elem[a][b] += w * (spec.viscosity * (ga[0] * gb[0] + ga[1] * gb[1]) +
                                 phi_a * (vel[0] * gb[0] + vel[1] * gb[1]));
            }
          }
        }
      }
      for (int a = 0; a < 4; ++a) {
        if (!interior[a]) continue;
        for (int b = 0; b < 4; ++b) {
          if (!interior[b]) continue;
          for (std::size_t comp = 0; comp < 2; ++comp) {
            a_entries.push_back({comp * nodes + ids[a], comp * nodes + ids[b], elem[a][b]});
          }
        }
      }

      // -(div u) integrated over the cell against the unit pressure.
      const std::size_t cell = cj * q + ci;
      for (int a = 0; a < 4; ++a) {
        if (!interior[a]) continue;
        const double sx = kCornerX[a] ? 1.0 : -1.0;
        const double sy = kCornerY[a] ? 1.0 : -1.0;
        b_entries.push_back({cell, ids[a], -sx * 0.5 * h});
        b_entries.push_back({cell, nodes + ids[a], -sy * 0.5 * h});
      }
    }
  }
  for (std::size_t j = 0; j < nodes_1d; ++j) {
    for (std::size_t i = 0; i < nodes_1d; ++i) {
      if (!on_boundary(i, j)) continue;
      a_entries.push_back({node(i, j), node(i, j), 1.0});
      a_entries.push_back({nodes + node(i, j), nodes + node(i, j), 1.0});
    }
  }

  std::vector<Triplet> c_entries;
  const double gamma = spec.stabilization * h * h;
  if (gamma > 0.0) {
    auto same_patch = [&](std::size_t i1, std::size_t j1, std::size_t i2, std::size_t j2) {
      return patch_of(i1, q) == patch_of(i2, q) && patch_of(j1, q) == patch_of(j2, q);
    };
    for (std::size_t cj = 0; cj < q; ++cj) {
      for (std::size_t ci = 0; ci < q; ++ci) {
        const std::size_t cell = cj * q + ci;
        double degree = 0.0;
        auto link = [&](std::size_t i2, std::size_t j2) {
          if (!same_patch(ci, cj, i2, j2)) return;
          c_entries.push_back({cell, j2 * q + i2, -gamma});
          degree += gamma;
        };
        if (ci > 0) link(ci - 1, cj);
        if (ci + 1 < q) link(ci + 1, cj);
        if (cj > 0) link(ci, cj - 1);
        if (cj + 1 < q) link(ci, cj + 1);
        if (degree > 0.0) c_entries.push_back({cell, cell, degree});
      }
    }
  }

  SparseMatrix a = SparseMatrix::from_triplets(n, n, a_entries);
  if (!is_positive_definite(a)) {
    throw std::logic_error("gen_oseen: assembled velocity block is not positive definite");
  }
  return SaddleSystem(std::move(a), SparseMatrix::from_triplets(m, n, b_entries),
                      SparseMatrix::from_triplets(m, m, c_entries));
}

SaddleSystem gen_synthetic_singular(const SyntheticSpec& spec) {
  const std::size_t n = spec.n, m = spec.m, r = spec.rank_b;
  if (n == 0 || m > n) throw std::invalid_argument("gen_synthetic_singular: need 0 < m <= n");
  if (r > m) throw std::invalid_argument("gen_synthetic_singular: rank_b exceeds m");
  if (spec.null_c > m) throw std::invalid_argument("gen_synthetic_singular: null_c exceeds m");
  const std::size_t common = spec.null_common < 0
                                 ? std::min(spec.null_c, m - r)
                                 : static_cast<std::size_t>(spec.null_common);
  if (common > spec.null_c || common > m - r) {
    throw std::invalid_argument(
        "gen_synthetic_singular: null_common must not exceed null_c or m - rank_b");
  }
  if (!(spec.shift > 0.0)) throw std::invalid_argument("gen_synthetic_singular: shift must be > 0");

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.5, 2.0);
  auto gaussian = [&](std::size_t rows, std::size_t cols, double scale) {
    Eigen::MatrixXd g(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < cols; ++j) g(i, j) = scale * normal(rng);
    }
    return g;
  };

  const double sn = 1.0 / std::sqrt(static_cast<double>(n));
  const Eigen::MatrixXd g = gaussian(n, n, sn);
  const Eigen::MatrixXd k = gaussian(n, n, sn * spec.skew_scale);
  const Eigen::MatrixXd a = g.transpose() * g +
                            spec.shift * Eigen::MatrixXd::Identity(n, n) +
                            0.5 * (k - k.transpose());

  // C = V diag(d) V^T; the first null_c columns of V span null(C).
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(m, m);
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(m, m);
  if (m > 0) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(gaussian(m, m, 1.0));
    v = qr.householderQ() * Eigen::MatrixXd::Identity(m, m);
    Eigen::VectorXd d(m);
    for (std::size_t i = 0; i < m; ++i) d(i) = i < spec.null_c ? 0.0 : uniform(rng);
    c = v * d.asDiagonal() * v.transpose();
    c = 0.5 * (c + c.transpose());
  }

  // B = (I - V_k V_k^T) U W keeps the first `common` null vectors of C in null(B^T).
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(m, n);
  if (r > 0) {
    const double sr = 1.0 / std::sqrt(static_cast<double>(r));
    const Eigen::MatrixXd u = gaussian(m, r, 1.0);
    const Eigen::MatrixXd w = gaussian(r, n, sr);
    Eigen::MatrixXd proj = Eigen::MatrixXd::Identity(m, m);
    if (common > 0) {
      const Eigen::MatrixXd vk = v.leftCols(common);
      proj -= vk * vk.transpose();
    }
    b = proj * u * w;
  }

  return SaddleSystem(SparseMatrix::from_dense(a), SparseMatrix::from_dense(b),
                      SparseMatrix::from_dense(c));
}

BlockVector rhs_from_ones(const SaddleSystem& sys) {
  return apply_blocks(sys, BlockVector(Vector(sys.n(), 1.0), Vector(sys.m(), 1.0)));
}

}  // namespace epss
