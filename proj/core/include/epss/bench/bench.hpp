#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "epss/analysis/certify.hpp"
#include "epss/krylov/gmres.hpp"
#include "epss/precond/config.hpp"
#include "epss/problems/generators.hpp"
#include "epss/saddle/system.hpp"

namespace epss::bench {

enum class ProblemKind { oseen, synthetic, identity, imported };

std::string_view to_string(ProblemKind k);
std::optional<ProblemKind> parse_problem_kind(std::string_view name);

struct ProblemSpec {
  ProblemKind kind = ProblemKind::oseen;
  OseenSpec oseen;
  SyntheticSpec synthetic;
  std::size_t identity_n = 4;  ///< identity problem: A = I_n, B = 0, C = I_m with m = n / 2
  std::string manifest;        ///< imported problem
};

struct Problem {
  SaddleSystem sys;
  /// True when the system is known to be nonsingular, which is when the
  /// error against e = ones is meaningful.
  bool nonsingular = false;
  std::string description;
};

Problem make_problem(const ProblemSpec& spec);

/// A preset at a (t_alpha, t_beta) point, SEPSS with the fixed parameter
/// pairs (1e-4, beta*) and (1e-4, beta**), or no preconditioner.
struct Method {
  enum class Kind { preset, sepss_star, sepss_double_star, none };
  Kind kind = Kind::preset;
  Preset preset = Preset::sepss;

  std::string name() const;
  /// Parameters come from the sweep grid.
  bool swept() const { return kind == Kind::preset; }
  bool uses_beta() const { return kind == Kind::preset && !is_single_parameter(preset); }
};

/// Preset names (case-insensitive), "SEPSS*", "SEPSS**" and "NONE".
std::optional<Method> parse_method(std::string_view name);

/// Inclusive range start:step:stop.
struct Range {
  double start = -4.0;
  double step = 0.25;
  double stop = 4.0;
  std::vector<double> values() const;
};

/// "a:s:b" or a single value "a". Throws std::invalid_argument.
Range parse_range(std::string_view text);

enum class SolverKind { gmres, fgmres };
std::string_view to_string(SolverKind k);
std::optional<SolverKind> parse_solver(std::string_view name);

/// Fixed alpha used by the SEPSS* and SEPSS** methods.
inline constexpr double kSepssFixedAlpha = 1e-4;

struct ResultRow {
  std::string method;
  std::optional<double> t_alpha;  ///< empty when not taken from the grid
  std::optional<double> t_beta;   ///< empty for single-parameter presets
  double alpha = 0.0;
  double beta = 0.0;
  std::size_t iterations = 0;
  double cpu = 0.0;         ///< build + solve seconds
  double build_time = 0.0;
  double solve_time = 0.0;
  double residual = 0.0;    ///< R_k
  std::optional<double> error;  ///< E_k
  bool converged = false;
  std::string stop;  ///< stop reason, or "error"
  std::string message;
};

struct RunContext {
  const SaddleSystem* sys = nullptr;
  Vector rhs;
  bool nonsingular = false;
  SolveOptions solver;
  SolverKind solver_kind = SolverKind::gmres;
};

RunContext make_context(const Problem& problem, const SolveOptions& solver, SolverKind kind);

/// One solve from a zero initial guess. Failures (singular shifted
/// operators, bad parameters) come back as non-converged rows.
ResultRow run_cell(const RunContext& ctx, const Method& method, std::optional<double> t_alpha,
                   std::optional<double> t_beta);

struct SweepSpec {
  std::vector<Method> methods;
  Range t_alpha;
  Range t_beta;
  ProblemSpec problem;
  SolveOptions solver;
  SolverKind solver_kind = SolverKind::gmres;
  std::size_t workers = 0;  ///< 0: EPSS_WORKERS or hardware concurrency
};

struct SweepResult {
  std::string problem;
  std::vector<ResultRow> rows;
  std::vector<ResultRow> best;  ///< one per method, in method order
};

/// Number of rows a sweep produces for the given methods and grids.
std::size_t sweep_size(const std::vector<Method>& methods, const Range& t_alpha, const Range& t_beta);

/// Runs every cell on a worker pool; row order is fixed by (method, t_alpha, t_beta).
SweepResult sweep(const SweepSpec& spec);
SweepResult sweep(const RunContext& ctx, const std::string& problem,
                  const std::vector<Method>& methods, const Range& t_alpha, const Range& t_beta,
                  std::size_t workers = 0);

/// Minimum IT among converged rows, ties broken by the smaller CPU time.
/// Without converged rows the smallest residual wins. Empty input gives nullopt.
std::optional<ResultRow> select_best(const std::vector<ResultRow>& rows);

/// Pool size from EPSS_WORKERS, else the hardware concurrency (at least 1).
std::size_t default_workers();

struct CertifyOutcome {
  std::string problem;
  std::string preset;
  double alpha = 0.0;
  double beta = 0.0;
  SpectralReport spectral;
  CorollaryReport corollary;
  TheoremCheck theorem;
};

/// Throws DimensionError when n + m exceeds the dense limit.
CertifyOutcome cmd_certify(const Problem& problem, Preset preset, double alpha, double beta,
                           const CertifyOptions& opts = {});

enum class Format { json, csv, text };
std::optional<Format> parse_format(std::string_view name);

std::string render_rows(const std::vector<ResultRow>& rows, Format format);
std::string render_sweep(const SweepResult& result, Format format);
std::string render_certify(const CertifyOutcome& outcome, Format format);

/// Shortest decimal text that reads back to the same double.
std::string format_number(double v);

}  // namespace epss::bench
