#include "epss/bench/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <stdexcept>
#include <thread>

#include "epss/errors.hpp"
#include "epss/precond/operator.hpp"
#include "epss/precond/parameters.hpp"
#include "epss/problems/matrix_market.hpp"

namespace epss::bench {

namespace {

std::string upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return out;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool dense_nonsingular(const SaddleSystem& sys) {
  if (sys.size() > kDenseSpectralLimit) return false;
  const SystemDiagnostics d = validate(sys);
  return d.dense_checked && !d.singular;
}

}  // namespace

std::string_view to_string(ProblemKind k) {
  switch (k) {
    case ProblemKind::oseen: return "oseen";
    case ProblemKind::synthetic: return "synthetic";
    case ProblemKind::identity: return "identity";
    case ProblemKind::imported: return "imported";
  }
  return "unknown";
}

std::optional<ProblemKind> parse_problem_kind(std::string_view name) {
  const std::string s = lower(name);
  if (s == "oseen" || s == "oseen-fd") return ProblemKind::oseen;
  if (s == "synthetic" || s == "synthetic-singular") return ProblemKind::synthetic;
  if (s == "identity") return ProblemKind::identity;
  if (s == "imported") return ProblemKind::imported;
  return std::nullopt;
}

Problem make_problem(const ProblemSpec& spec) {
  switch (spec.kind) {
    case ProblemKind::oseen: {
      const auto& o = spec.oseen;
      return {gen_oseen(o), false,
              "oseen q=" + std::to_string(o.grid) + " nu=" + format_number(o.viscosity) +
                  " wind=" + std::string(to_string(o.wind)) +
                  " stabilization=" + format_number(o.stabilization) +
                  (o.wind == WindField::recirculating ? " (stand-in cavity wind)" : "")};
    }
    case ProblemKind::synthetic: {
      const auto& s = spec.synthetic;
      SaddleSystem sys = gen_synthetic_singular(s);
      const bool ns = dense_nonsingular(sys);
      return {std::move(sys), ns,
              "synthetic n=" + std::to_string(s.n) + " m=" + std::to_string(s.m) +
                  " rank_b=" + std::to_string(s.rank_b) + " null_c=" + std::to_string(s.null_c) +
                  " seed=" + std::to_string(s.seed)};
    }
    case ProblemKind::identity: {
      const std::size_t n = std::max<std::size_t>(spec.identity_n, 1);
      const std::size_t m = n / 2;
      return {SaddleSystem(SparseMatrix::identity(n), SparseMatrix(m, n), SparseMatrix::identity(m)),
              true, "identity n=" + std::to_string(n) + " m=" + std::to_string(m)};
    }
    case ProblemKind::imported: {
      SaddleSystem sys = read_system(spec.manifest);
      const bool ns = dense_nonsingular(sys);
      return {std::move(sys), ns, "imported " + spec.manifest};
    }
  }
  throw std::invalid_argument("make_problem: unknown problem kind");
}

std::string Method::name() const {
  switch (kind) {
    case Kind::preset: return std::string(to_string(preset));
    case Kind::sepss_star: return "SEPSS*";
    case Kind::sepss_double_star: return "SEPSS**";
    case Kind::none: return "NONE";
  }
  return "unknown";
}

std::optional<Method> parse_method(std::string_view name) {
  const std::string s = upper(name);
  if (s == "SEPSS*") return Method{Method::Kind::sepss_star, Preset::sepss};
  if (s == "SEPSS**") return Method{Method::Kind::sepss_double_star, Preset::sepss};
  if (s == "NONE") return Method{Method::Kind::none, Preset::custom};
  const auto p = parse_preset(s);
  if (!p || *p == Preset::custom) return std::nullopt;
  return Method{Method::Kind::preset, *p};
}

std::vector<double> Range::values() const {
  std::vector<double> out;
  if (!(step > 0.0) || stop < start) return out;
  const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) out.push_back(start + static_cast<double>(k) * step);
  return out;
}

Range parse_range(std::string_view text) {
  auto number = [&](std::string_view tok) {
    double v = 0.0;
    const char* first = tok.data();
    if (!tok.empty() && tok.front() == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, tok.data() + tok.size(), v);
    if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v)) {
      throw std::invalid_argument("invalid range '" + std::string(text) + "'");
    }
    return v;
  };
  std::vector<std::string_view> parts;
  std::size_t pos = 0;
  while (true) {
    const std::size_t colon = text.find(':', pos);
    parts.push_back(text.substr(pos, colon == std::string_view::npos ? colon : colon - pos));
    if (colon == std::string_view::npos) break;
    pos = colon + 1;
  }
  Range r;
  if (parts.size() == 1) {
    r.start = r.stop = number(parts[0]);
    r.step = 1.0;
  } else if (parts.size() == 3) {
    r.start = number(parts[0]);
    r.step = number(parts[1]);
    r.stop = number(parts[2]);
  } else {
    throw std::invalid_argument("range must be 'start:step:stop' or a single value");
  }
  if (!(r.step > 0.0)) throw std::invalid_argument("range step must be positive");
  if (r.stop < r.start) throw std::invalid_argument("range is empty (stop < start)");
  return r;
}

std::string_view to_string(SolverKind k) { return k == SolverKind::fgmres ? "fgmres" : "gmres"; }

std::optional<SolverKind> parse_solver(std::string_view name) {
  const std::string s = lower(name);
  if (s == "gmres") return SolverKind::gmres;
  if (s == "fgmres") return SolverKind::fgmres;
  return std::nullopt;
}

RunContext make_context(const Problem& problem, const SolveOptions& solver, SolverKind kind) {
  RunContext ctx;
  ctx.sys = &problem.sys;
  ctx.rhs = rhs_from_ones(problem.sys).flatten();
  ctx.nonsingular = problem.nonsingular;
  ctx.solver = solver;
  ctx.solver_kind = kind;
  return ctx;
}

ResultRow run_cell(const RunContext& ctx, const Method& method, std::optional<double> t_alpha,
                   std::optional<double> t_beta) {
  const SaddleSystem& sys = *ctx.sys;
  ResultRow row;
  row.method = method.name();
  row.t_alpha = t_alpha;
  row.t_beta = method.uses_beta() ? t_beta : std::nullopt;
  row.stop = "error";
  try {
    const auto start = std::chrono::steady_clock::now();
    std::optional<EpssOperator> op;
    switch (method.kind) {
      case Method::Kind::preset: {
        if (!t_alpha) throw std::invalid_argument("preset methods need t_alpha");
        row.alpha = std::pow(10.0, *t_alpha);
        if (method.uses_beta()) {
          if (!t_beta) throw std::invalid_argument("two-parameter presets need t_beta");
          row.beta = std::pow(10.0, *t_beta);
        } else {
          row.beta = row.alpha;
        }
        op = EpssOperator::build(sys, preset_config(method.preset, sys, row.alpha, row.beta));
        break;
      }
      case Method::Kind::sepss_star:
      case Method::Kind::sepss_double_star: {
        row.alpha = kSepssFixedAlpha;
        const BetaEstimate est = method.kind == Method::Kind::sepss_star
                                     ? sepss_beta_star(sys, row.alpha)
                                     : sepss_beta_double_star(sys);
        row.beta = est.value;
        if (est.degenerate || !(est.value > 0.0)) {
          throw std::invalid_argument("beta estimate is degenerate (C_S = 0)");
        }
        op = EpssOperator::build(sys, preset_config(Preset::sepss, sys, row.alpha, row.beta));
        break;
      }
      case Method::Kind::none:
        break;
    }
    row.build_time = seconds_since(start);

    const LinearMap apply_a = [&](std::span<const double> x, std::span<double> y) {
      apply_full(sys, x, y);
    };
    const Vector u0(sys.size(), 0.0);
    const auto solve_start = std::chrono::steady_clock::now();
    SolveResult res;
    if (ctx.solver_kind == SolverKind::fgmres) {
      FlexiblePreconditioner pre;
      if (op) {
        pre = [&](std::size_t, std::span<const double> x, std::span<double> y) { op->apply(x, y); };
      }
      res = fgmres(apply_a, pre, ctx.rhs, u0, ctx.solver);
    } else {
      LinearMap pre;
      if (op) pre = [&](std::span<const double> x, std::span<double> y) { op->apply(x, y); };
      res = gmres(apply_a, pre, ctx.rhs, u0, ctx.solver);
    }
    row.solve_time = seconds_since(solve_start);
    row.cpu = row.build_time + row.solve_time;
    row.iterations = res.report.iterations;
    row.residual = res.report.final_residual;
    row.converged = res.report.converged;
    row.stop = std::string(to_string(res.report.stop_reason));
    if (ctx.nonsingular) {
      double err = 0.0;
      for (double v : res.u) err += (v - 1.0) * (v - 1.0);
      row.error = std::sqrt(err / static_cast<double>(res.u.size()));
    }
  } catch (const std::exception& e) {
    row.converged = false;
    row.stop = "error";
    row.message = e.what();
  }
  return row;
}

std::size_t sweep_size(const std::vector<Method>& methods, const Range& t_alpha,
                       const Range& t_beta) {
  const std::size_t na = t_alpha.values().size(), nb = t_beta.values().size();
  std::size_t total = 0;
  for (const Method& m : methods) {
    if (!m.swept()) {
      total += 1;
    } else {
      total += m.uses_beta() ? na * nb : na;
    }
  }
  return total;
}

std::size_t default_workers() {
  if (const char* env = std::getenv("EPSS_WORKERS")) {
    std::size_t v = 0;
    const std::string_view s(env);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc() && ptr == s.data() + s.size() && v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

SweepResult sweep(const RunContext& ctx, const std::string& problem,
                  const std::vector<Method>& methods, const Range& t_alpha, const Range& t_beta,
                  std::size_t workers) {
  struct Cell {
    const Method* method;
    std::optional<double> ta, tb;
  };
  const auto as = t_alpha.values(), bs = t_beta.values();
  std::vector<Cell> cells;
  for (const Method& m : methods) {
    if (!m.swept()) {
      cells.push_back({&m, std::nullopt, std::nullopt});
    } else if (m.uses_beta()) {
      for (double a : as) {
        for (double b : bs) cells.push_back({&m, a, b});
      }
    } else {
      for (double a : as) cells.push_back({&m, a, std::nullopt});
    }
  }

  SweepResult out;
  out.problem = problem;
  out.rows.resize(cells.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      out.rows[i] = run_cell(ctx, *cells[i].method, cells[i].ta, cells[i].tb);
    }
  };
  const std::size_t pool = std::min(workers ? workers : default_workers(), cells.size());
  if (pool <= 1) {
    work();
  } else {
    std::vector<std::jthread> threads;
    threads.reserve(pool);
    for (std::size_t t = 0; t < pool; ++t) threads.emplace_back(work);
  }

  for (const Method& m : methods) {
    std::vector<ResultRow> mine;
    const std::string name = m.name();
    for (const auto& r : out.rows) {
      if (r.method == name) mine.push_back(r);
    }
    if (auto best = select_best(mine)) out.best.push_back(*best);
  }
  return out;
}

SweepResult sweep(const SweepSpec& spec) {
  const Problem problem = make_problem(spec.problem);
  const RunContext ctx = make_context(problem, spec.solver, spec.solver_kind);
  return sweep(ctx, problem.description, spec.methods, spec.t_alpha, spec.t_beta, spec.workers);
}

std::optional<ResultRow> select_best(const std::vector<ResultRow>& rows) {
  const ResultRow* best = nullptr;
  for (const auto& r : rows) {
    if (!best) {
      best = &r;
      continue;
    }
    if (r.converged != best->converged) {
      if (r.converged) best = &r;
      continue;
    }
    if (r.converged) {
      if (r.iterations < best->iterations ||
          (r.iterations == best->iterations && r.cpu < best->cpu)) {
        best = &r;
      }
    } else if (r.residual < best->residual) {
      best = &r;
    }
  }
  if (!best) return std::nullopt;
  return *best;
}

CertifyOutcome cmd_certify(const Problem& problem, Preset preset, double alpha, double beta,
                           const CertifyOptions& opts) {
  const SaddleSystem& sys = problem.sys;
  if (sys.size() > kDenseSpectralLimit) {
    throw DimensionError("certify: n + m = " + std::to_string(sys.size()) +
                         " exceeds the dense limit of " + std::to_string(kDenseSpectralLimit));
  }
  const EpssConfig cfg = preset_config(preset, sys, alpha, beta);
  CertifyOutcome out;
  out.problem = problem.description;
  out.preset = std::string(to_string(preset));
  out.alpha = cfg.alpha;
  out.beta = cfg.beta;
  out.spectral = certify(sys, cfg, opts);
  out.corollary = corollary_check(sys, cfg);
  out.theorem = theorem_condition_check(sys, cfg, out.spectral, opts);
  return out;
}

std::optional<Format> parse_format(std::string_view name) {
  const std::string s = lower(name);
  if (s == "json") return Format::json;
  if (s == "csv") return Format::csv;
  if (s == "text") return Format::text;
  return std::nullopt;
}

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

}  // namespace epss::bench
