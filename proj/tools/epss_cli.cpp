// epss command-line driver: sweep, run, certify, gen.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "epss/bench/bench.hpp"
#include "epss/errors.hpp"
#include "epss/problems/matrix_market.hpp"

namespace {

using namespace epss;
using namespace epss::bench;
using nlohmann::json;

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Flags {
  std::optional<std::string> config;
  std::optional<std::string> problem;
  std::optional<std::size_t> grid;
  std::optional<double> nu;
  std::optional<double> stabilization;
  std::optional<std::string> wind;
  std::optional<std::string> manifest;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n, m, rank_b, null_c;
  std::optional<long> null_common;
  std::optional<std::vector<std::string>> presets;
  std::optional<std::string> talpha, tbeta;
  std::optional<std::size_t> restart, max_iters;
  std::optional<double> tol, max_time;
  std::optional<std::string> solver;
  std::optional<std::string> format;
  std::optional<std::string> out;
  std::optional<std::size_t> workers;
  std::optional<double> unit_tol, rank_tol;
};

template <typename T>
T pick(const std::optional<T>& flag, const json& cfg, const char* key, T fallback) {
  if (flag) return *flag;
  if (cfg.contains(key)) {
    try {
      return cfg.at(key).get<T>();
    } catch (const json::exception& e) {
      throw UsageError(std::string("config key '") + key + "': " + e.what());
    }
  }
  return fallback;
}

json load_config(const Flags& f) {
  if (!f.config) return json::object();
  std::ifstream in(*f.config);
  if (!in) throw UsageError("cannot open config file " + *f.config);
  try {
    json j = json::parse(in);
    if (!j.is_object()) throw UsageError("config file must hold a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    throw UsageError(std::string("config file: ") + e.what());
  }
}

ProblemSpec problem_spec(const Flags& f, const json& cfg) {
  ProblemSpec spec;
  const std::string kind = pick<std::string>(f.problem, cfg, "problem", "oseen");
  const auto k = parse_problem_kind(kind);
  if (!k) throw UsageError("unknown problem '" + kind + "'");
  spec.kind = *k;
  spec.oseen.grid = pick<std::size_t>(f.grid, cfg, "grid", 16);
  spec.oseen.viscosity = pick<double>(f.nu, cfg, "nu", 0.01);
  spec.oseen.stabilization = pick<double>(f.stabilization, cfg, "stabilization", 0.25);
  const std::string wind = pick<std::string>(f.wind, cfg, "wind", "recirculating");
  if (wind == "recirculating") {
    spec.oseen.wind = WindField::recirculating;
  } else if (wind == "none") {
    spec.oseen.wind = WindField::none;
  } else {
    throw UsageError("unknown wind '" + wind + "'");
  }
  auto& s = spec.synthetic;
  s.seed = pick<std::uint64_t>(f.seed, cfg, "seed", 1);
  s.n = pick<std::size_t>(f.n, cfg, "n", 20);
  s.m = pick<std::size_t>(f.m, cfg, "m", 10);
  s.rank_b = pick<std::size_t>(f.rank_b, cfg, "rank_b", s.m);
  s.null_c = pick<std::size_t>(f.null_c, cfg, "null_c", 0);
  s.null_common = pick<long>(f.null_common, cfg, "null_common", -1);
  spec.identity_n = s.n;
  spec.manifest = pick<std::string>(f.manifest, cfg, "manifest", "");
  if (spec.kind == ProblemKind::imported && spec.manifest.empty()) {
    throw UsageError("imported problems need --manifest");
  }
  return spec;
}

SolveOptions solve_options(const Flags& f, const json& cfg) {
  SolveOptions o;
  o.restart = pick<std::size_t>(f.restart, cfg, "restart", o.restart);
  o.rel_tol = pick<double>(f.tol, cfg, "tol", o.rel_tol);
  o.max_iters = pick<std::size_t>(f.max_iters, cfg, "max_iters", o.max_iters);
  o.max_time = pick<double>(f.max_time, cfg, "max_time", o.max_time);
  if (o.restart < 1) throw UsageError("--restart must be >= 1");
  if (!(o.rel_tol > 0.0)) throw UsageError("--tol must be positive");
  return o;
}

SolverKind solver_kind(const Flags& f, const json& cfg) {
  const std::string name = pick<std::string>(f.solver, cfg, "solver", "gmres");
  const auto k = parse_solver(name);
  if (!k) throw UsageError("unknown solver '" + name + "'");
  return *k;
}

std::optional<Format> output_format(const Flags& f, const json& cfg) {
  if (!f.format && !cfg.contains("format")) return std::nullopt;
  const std::string name = pick<std::string>(f.format, cfg, "format", "text");
  const auto fmt = parse_format(name);
  if (!fmt) throw UsageError("unknown format '" + name + "'");
  return fmt;
}

std::vector<Method> methods(const Flags& f, const json& cfg, std::vector<std::string> fallback) {
  std::vector<std::string> names = pick(f.presets, cfg, "preset", fallback);
  std::vector<Method> out;
  for (const auto& item : names) {
    std::stringstream ss(item);
    std::string name;
    while (std::getline(ss, name, ',')) {
      if (name.empty()) continue;
      const auto m = parse_method(name);
      if (!m) throw UsageError("unknown preset '" + name + "'");
      out.push_back(*m);
    }
  }
  if (out.empty()) throw UsageError("no preset given");
  return out;
}

Range range(const std::optional<std::string>& flag, const json& cfg, const char* key,
            const std::string& fallback) {
  try {
    return parse_range(pick<std::string>(flag, cfg, key, fallback));
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--") + key + ": " + e.what());
  }
}

double single_value(const std::optional<std::string>& flag, const json& cfg, const char* key,
                    const std::string& fallback) {
  const Range r = range(flag, cfg, key, fallback);
  if (r.start != r.stop) throw UsageError(std::string("--") + key + " takes a single value here");
  return r.start;
}

void emit(const Flags& f, const json& cfg, const std::string& text) {
  const std::string path = pick<std::string>(f.out, cfg, "out", "");
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write " + path);
  out << text;
}

int do_sweep(const Flags& f) {
  const json cfg = load_config(f);
  SweepSpec spec;
  spec.problem = problem_spec(f, cfg);
  spec.methods = methods(f, cfg, {"HSS", "PSS", "SEPSS*"});
  spec.t_alpha = range(f.talpha, cfg, "talpha", "-4:0.25:4");
  spec.t_beta = range(f.tbeta, cfg, "tbeta", "-4:0.25:4");
  spec.solver = solve_options(f, cfg);
  spec.solver_kind = solver_kind(f, cfg);
  spec.workers = pick<std::size_t>(f.workers, cfg, "workers", 0);
  const Format fmt = output_format(f, cfg).value_or(Format::text);
  const SweepResult result = sweep(spec);
  emit(f, cfg, render_sweep(result, fmt));
  for (const auto& b : result.best) {
    if (!b.converged) return kFailed;
  }
  return kOk;
}

int do_run(const Flags& f) {
  const json cfg = load_config(f);
  const auto ms = methods(f, cfg, {"SEPSS*"});
  if (ms.size() != 1) throw UsageError("run takes exactly one preset");
  const double ta = single_value(f.talpha, cfg, "talpha", "0");
  const double tb = single_value(f.tbeta, cfg, "tbeta", "0");
  const Problem problem = make_problem(problem_spec(f, cfg));
  const RunContext ctx = make_context(problem, solve_options(f, cfg), solver_kind(f, cfg));
  const ResultRow row = run_cell(ctx, ms[0], ms[0].swept() ? std::optional(ta) : std::nullopt,
                                 ms[0].uses_beta() ? std::optional(tb) : std::nullopt);
  const auto fmt = output_format(f, cfg);
  if (fmt) {
    emit(f, cfg, render_rows({row}, *fmt));
  } else {
    emit(f, cfg, render_rows({row}, Format::text) + render_rows({row}, Format::json));
  }
  return row.converged ? kOk : kFailed;
}

int do_certify(const Flags& f) {
  const json cfg = load_config(f);
  const auto ms = methods(f, cfg, {"SEPSS"});
  if (ms.size() != 1 || ms[0].kind != Method::Kind::preset) {
    throw UsageError("certify takes exactly one named preset");
  }
  const double alpha = std::pow(10.0, single_value(f.talpha, cfg, "talpha", "0"));
  const double beta = std::pow(10.0, single_value(f.tbeta, cfg, "tbeta", "0"));
  CertifyOptions opts;
  opts.unit_tol = pick<double>(f.unit_tol, cfg, "unit_tol", opts.unit_tol);
  opts.rank_tol = pick<double>(f.rank_tol, cfg, "rank_tol", opts.rank_tol);
  const Problem problem = make_problem(problem_spec(f, cfg));
  if (problem.sys.size() > kDenseSpectralLimit) {
    throw UsageError("certify is limited to n + m <= " + std::to_string(kDenseSpectralLimit) +
                     " (this problem has " + std::to_string(problem.sys.size()) + ")");
  }
  const CertifyOutcome outcome = cmd_certify(problem, ms[0].preset, alpha, beta, opts);
  emit(f, cfg, render_certify(outcome, output_format(f, cfg).value_or(Format::text)));
  return outcome.spectral.semi_convergent ? kOk : kFailed;
}

int do_gen(const Flags& f) {
  const json cfg = load_config(f);
  const std::string dir = pick<std::string>(f.out, cfg, "out", "");
  if (dir.empty()) throw UsageError("gen needs --out <directory>");
  const Problem problem = make_problem(problem_spec(f, cfg));
  write_system(problem.sys, dir, problem.description);
  std::cout << "wrote " << problem.description << " (n=" << problem.sys.n()
            << ", m=" << problem.sys.m() << ") to " << dir << '\n';
  return kOk;
}

void add_problem_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "JSON file with defaults; flags override it");
  cmd->add_option("--problem", f.problem, "oseen | synthetic | identity | imported");
  cmd->add_option("--grid", f.grid, "Oseen grid q (q x q cells)");
  cmd->add_option("--nu", f.nu, "Oseen viscosity");
  cmd->add_option("--stabilization", f.stabilization, "Oseen pressure stabilization factor");
  cmd->add_option("--wind", f.wind, "recirculating | none");
  cmd->add_option("--manifest", f.manifest, "manifest.json of an imported system");
  cmd->add_option("--seed", f.seed, "synthetic seed");
  cmd->add_option("--n", f.n, "synthetic velocity size (identity size)");
  cmd->add_option("--m", f.m, "synthetic pressure size");
  cmd->add_option("--rank-b", f.rank_b, "synthetic rank of B");
  cmd->add_option("--null-c", f.null_c, "synthetic dim null(C)");
  cmd->add_option("--null-common", f.null_common, "synthetic dim null(B^T) ∩ null(C)");
}

void add_solver_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--restart", f.restart, "GMRES restart length");
  cmd->add_option("--tol", f.tol, "relative residual tolerance");
  cmd->add_option("--max-iters", f.max_iters, "maximum total inner iterations");
  cmd->add_option("--max-time", f.max_time, "time limit per solve in seconds");
  cmd->add_option("--solver", f.solver, "gmres | fgmres");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Saddle point solver toolkit: EPSS-family preconditioners with GMRES"};
  app.require_subcommand(1);
  Flags f;

  auto* sweep_cmd = app.add_subcommand("sweep", "parameter sweep over presets and (t_alpha, t_beta)");
  add_problem_flags(sweep_cmd, f);
  add_solver_flags(sweep_cmd, f);
  sweep_cmd->add_option("--preset", f.presets, "presets, SEPSS*, SEPSS** or NONE (comma separated)");
  sweep_cmd->add_option("--talpha", f.talpha, "t_alpha range start:step:stop (alpha = 10^t)");
  sweep_cmd->add_option("--tbeta", f.tbeta, "t_beta range start:step:stop (beta = 10^t)");
  sweep_cmd->add_option("--workers", f.workers, "worker threads (default EPSS_WORKERS or all cores)");
  sweep_cmd->add_option("--format", f.format, "json | csv | text");
  sweep_cmd->add_option("--out", f.out, "write the report to this file");

  auto* run_cmd = app.add_subcommand("run", "single solve from a zero initial guess");
  add_problem_flags(run_cmd, f);
  add_solver_flags(run_cmd, f);
  run_cmd->add_option("--preset", f.presets, "preset, SEPSS*, SEPSS** or NONE");
  run_cmd->add_option("--talpha", f.talpha, "alpha = 10^t_alpha");
  run_cmd->add_option("--tbeta", f.tbeta, "beta = 10^t_beta");
  run_cmd->add_option("--format", f.format, "json | csv | text (default: text and json)");
  run_cmd->add_option("--out", f.out, "write the report to this file");

  auto* cert_cmd = app.add_subcommand("certify", "dense semi-convergence certificate");
  add_problem_flags(cert_cmd, f);
  cert_cmd->add_option("--preset", f.presets, "named preset");
  cert_cmd->add_option("--talpha", f.talpha, "alpha = 10^t_alpha");
  cert_cmd->add_option("--tbeta", f.tbeta, "beta = 10^t_beta");
  cert_cmd->add_option("--unit-tol", f.unit_tol, "|lambda - 1| tolerance for the unit eigenvalue");
  cert_cmd->add_option("--rank-tol", f.rank_tol, "relative rank tolerance");
  cert_cmd->add_option("--format", f.format, "json | csv | text");
  cert_cmd->add_option("--out", f.out, "write the report to this file");

  auto* gen_cmd = app.add_subcommand("gen", "write a problem as MatrixMarket files and a manifest");
  add_problem_flags(gen_cmd, f);
  gen_cmd->add_option("--out", f.out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*sweep_cmd) return do_sweep(f);
    if (*run_cmd) return do_run(f);
    if (*cert_cmd) return do_certify(f);
    if (*gen_cmd) return do_gen(f);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailed;
  }
  return kUsage;
}
