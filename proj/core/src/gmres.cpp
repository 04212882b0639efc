#include "epss/krylov/gmres.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "epss/errors.hpp"

namespace epss {

std::string_view to_string(StopReason r) {
  switch (r) {
    case StopReason::tolerance: return "tol";
    case StopReason::max_iters: return "max-iters";
    case StopReason::max_time: return "max-time";
    case StopReason::breakdown: return "breakdown";
  }
  return "unknown";
}

namespace {

// Second Gram-Schmidt pass when the norm drops below this fraction.
constexpr double kReorthogonalize = 0.7;
constexpr double kHappyBreakdown = 1e-14;

void givens(double a, double b, double& c, double& s) {
  if (b == 0.0) {
    c = 1.0;
    s = 0.0;
  } else if (std::abs(b) > std::abs(a)) {
    const double t = a / b;
    s = 1.0 / std::sqrt(1.0 + t * t);
    c = s * t;
  } else {
    const double t = b / a;
    c = 1.0 / std::sqrt(1.0 + t * t);
    s = c * t;
  }
}

bool all_finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

template <bool Flexible, typename Precond>
SolveResult run_gmres(const LinearMap& a, const Precond& precond, std::span<const double> b,
                      std::span<const double> u0, const SolveOptions& opts) {
  const std::size_t n = b.size();
  if (u0.size() != n) throw DimensionError("gmres: b and u0 differ in length");
  if (opts.restart < 1) throw std::invalid_argument("gmres: restart must be >= 1");
  if (!(opts.rel_tol > 0.0)) throw std::invalid_argument("gmres: rel_tol must be positive");

  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(clock::now() - start).count(); };

  SolveResult out;
  out.u.assign(u0.begin(), u0.end());
  SolveReport& rep = out.report;

  const std::size_t k_max = opts.restart;
  const double bnorm = norm2(b);
  const double scale = bnorm > 0.0 ? bnorm : 1.0;

  std::vector<Vector> v(k_max + 1, Vector(n));
  std::vector<Vector> z(Flexible ? k_max : 1, Vector(n));
  std::vector<double> h((k_max + 1) * k_max, 0.0);  // column-major (k_max+1) x k_max
  auto H = [&](std::size_t i, std::size_t j) -> double& { return h[j * (k_max + 1) + i]; };
  std::vector<double> cs(k_max), sn(k_max), g(k_max + 1), y(k_max);
  Vector r(n), w(n);

  auto true_residual = [&] {
    a(out.u, r);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
    return norm2(r);
  };

  double beta = true_residual();
  rep.residual_history.push_back(beta / scale);
  rep.stop_reason = StopReason::max_iters;
  if (beta / scale <= opts.rel_tol) {
    rep.converged = true;
    rep.stop_reason = StopReason::tolerance;
  }

  while (!rep.converged) {
    if (rep.iterations >= opts.max_iters) {
      rep.stop_reason = StopReason::max_iters;
      break;
    }
    if (elapsed() > opts.max_time) {
      rep.stop_reason = StopReason::max_time;
      break;
    }
    for (std::size_t i = 0; i < n; ++i) v[0][i] = r[i] / beta;
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = beta;

    std::size_t k = 0;
    bool happy = false;
    bool broken = false;
    bool out_of_budget = false;
    for (std::size_t j = 0; j < k_max; ++j) {
      if (rep.iterations >= opts.max_iters || elapsed() > opts.max_time) {
        out_of_budget = true;
        break;
      }
      Vector& zj = Flexible ? z[j] : z[0];
      if constexpr (Flexible) {
        precond(rep.iterations, v[j], zj);
      } else {
        if (precond) {
          precond(v[j], zj);
        } else {
          std::copy(v[j].begin(), v[j].end(), zj.begin());
        }
      }
      a(zj, w);
      const double w_norm0 = norm2(w);
      for (std::size_t i = 0; i <= j; ++i) {
        H(i, j) = dot(w, v[i]);
        axpy(-H(i, j), v[i], w);
      }
      double w_norm = norm2(w);
      if (w_norm < kReorthogonalize * w_norm0) {
        for (std::size_t i = 0; i <= j; ++i) {
          const double c = dot(w, v[i]);
          H(i, j) += c;
          axpy(-c, v[i], w);
        }
        w_norm = norm2(w);
      }
      H(j + 1, j) = w_norm;
      if (!std::isfinite(w_norm0) || !std::isfinite(w_norm) || !all_finite(zj)) {
        broken = true;
        break;
      }

      for (std::size_t i = 0; i < j; ++i) {
        const double t = cs[i] * H(i, j) + sn[i] * H(i + 1, j);
        H(i + 1, j) = -sn[i] * H(i, j) + cs[i] * H(i + 1, j);
        H(i, j) = t;
      }
      givens(H(j, j), H(j + 1, j), cs[j], sn[j]);
      H(j, j) = cs[j] * H(j, j) + sn[j] * H(j + 1, j);
      H(j + 1, j) = 0.0;
      g[j + 1] = -sn[j] * g[j];
      g[j] = cs[j] * g[j];

      ++rep.iterations;
      k = j + 1;
      const double estimate = std::abs(g[j + 1]) / scale;
      rep.residual_history.push_back(estimate);

      happy = w_norm <= kHappyBreakdown * w_norm0;
      if (!happy) {
        for (std::size_t i = 0; i < n; ++i) v[j + 1][i] = w[i] / w_norm;
      }
      if (estimate <= opts.rel_tol || happy) break;
    }

    // Drop trailing directions with a vanishing diagonal (singular A).
    while (k > 0 && std::abs(H(k - 1, k - 1)) == 0.0) --k;
    for (std::size_t i = k; i-- > 0;) {
      double s = g[i];
      for (std::size_t l = i + 1; l < k; ++l) s -= H(i, l) * y[l];
      y[i] = s / H(i, i);
    }
    if constexpr (Flexible) {
      for (std::size_t i = 0; i < k; ++i) axpy(y[i], z[i], out.u);
    } else {
      std::fill(w.begin(), w.end(), 0.0);
      for (std::size_t i = 0; i < k; ++i) axpy(y[i], v[i], w);
      if (precond) {
        precond(w, z[0]);
        axpy(1.0, z[0], out.u);
      } else {
        axpy(1.0, w, out.u);
      }
    }

    const double previous = beta;
    beta = true_residual();
    if (beta / scale <= opts.rel_tol) {
      rep.converged = true;
      rep.stop_reason = StopReason::tolerance;
    } else if (broken || !std::isfinite(beta)) {
      rep.stop_reason = StopReason::breakdown;
      break;
    } else if (happy && !(beta < previous)) {
      // Invariant subspace found but the residual cannot be reduced further.
      rep.stop_reason = StopReason::breakdown;
      break;
    } else if (out_of_budget) {
      rep.stop_reason =
          rep.iterations >= opts.max_iters ? StopReason::max_iters : StopReason::max_time;
      break;
    }
  }

  rep.final_residual = beta / scale;
  rep.wall_time = elapsed();
  return out;
}

}  // namespace

SolveResult gmres(const LinearMap& a, const LinearMap& precond, std::span<const double> b,
                  std::span<const double> u0, const SolveOptions& opts) {
  return run_gmres<false>(a, precond, b, u0, opts);
}

SolveResult fgmres(const LinearMap& a, const FlexiblePreconditioner& precond,
                   std::span<const double> b, std::span<const double> u0,
                   const SolveOptions& opts) {
  if (!precond) {
    const FlexiblePreconditioner identity = [](std::size_t, std::span<const double> in,
                                               std::span<double> o) {
      std::copy(in.begin(), in.end(), o.begin());
    };
    return run_gmres<true>(a, identity, b, u0, opts);
  }
  return run_gmres<true>(a, precond, b, u0, opts);
}

double relative_residual(const SaddleSystem& sys, std::span<const double> u,
                         std::span<const double> b) {
  if (b.size() != sys.size()) throw DimensionError("relative_residual: b has wrong length");
  Vector r(sys.size());
  apply_full(sys, u, r);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
  const double bnorm = norm2(b);
  return norm2(r) / (bnorm > 0.0 ? bnorm : 1.0);
}

bool singular_solve_check(const SaddleSystem& sys, std::span<const double> u,
                          std::span<const double> b, double tol) {
  return relative_residual(sys, u, b) <= tol;
}

}  // namespace epss
