#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace epss {

using Vector = std::vector<double>;

/// Row-major dense matrix; backs the desk-scale spectral tools.
using DenseMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline Eigen::Map<const Eigen::VectorXd> as_eigen(std::span<const double> v) {
  return {v.data(), static_cast<Eigen::Index>(v.size())};
}

inline Eigen::Map<Eigen::VectorXd> as_eigen(std::span<double> v) {
  return {v.data(), static_cast<Eigen::Index>(v.size())};
}

inline Vector to_vector(const Eigen::VectorXd& v) { return Vector(v.data(), v.data() + v.size()); }

double norm2(std::span<const double> v);
double dot(std::span<const double> a, std::span<const double> b);
/// y += a * x
void axpy(double a, std::span<const double> x, std::span<double> y);

}  // namespace epss
