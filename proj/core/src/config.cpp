#include <algorithm>
#include <cctype>
#include <stdexcept>
#include <string>

#include "epss/precond/config.hpp"

namespace epss {

namespace {

// Regularizer keeping Q2 positive definite when diag(C + C^T) has zeros.
constexpr double kShiftRegularizer = 1e-4;

enum class Branch { hss, pss, ss };
enum class Shifts { single, two, diagonal };

struct Row {
  Preset preset;
  const char* name;
  Branch branch;
  Shifts shifts;
};

constexpr Row kTable[] = {
    {Preset::hss, "HSS", Branch::hss, Shifts::single},
    {Preset::ghss, "GHSS", Branch::hss, Shifts::two},
    {Preset::ehss, "EHSS", Branch::hss, Shifts::diagonal},
    {Preset::pss, "PSS", Branch::pss, Shifts::single},
    {Preset::gpss, "GPSS", Branch::pss, Shifts::two},
    {Preset::epss, "EPSS", Branch::pss, Shifts::diagonal},
    {Preset::ss, "SS", Branch::ss, Shifts::single},
    {Preset::gss, "GSS", Branch::ss, Shifts::two},
    {Preset::ess, "ESS", Branch::ss, Shifts::diagonal},
};

const Row* find_row(Preset p) {
  for (const auto& r : kTable) {
    if (r.preset == p) return &r;
  }
  return nullptr;
}

}  // namespace

std::string_view to_string(Preset p) {
  if (p == Preset::sepss) return "SEPSS";
  if (p == Preset::custom) return "custom";
  return find_row(p)->name;
}

std::optional<Preset> parse_preset(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  for (Preset p : kAllPresets) {
    if (upper == to_string(p)) return p;
  }
  if (upper == "CUSTOM") return Preset::custom;
  return std::nullopt;
}

bool is_single_parameter(Preset p) {
  const Row* r = find_row(p);
  return r && r->shifts == Shifts::single;
}

bool has_zero_b_p(Preset p) {
  const Row* r = find_row(p);
  return r && r->branch != Branch::ss;
}

std::pair<SparseMatrix, SparseMatrix> diagonal_shift_bases(const SaddleSystem& sys) {
  Vector d1 = sys.a().diagonal();
  for (double& v : d1) v *= 2.0;
  Vector d2 = sys.c().diagonal();
  for (double& v : d2) v = kShiftRegularizer + 2.0 * v;
  return {SparseMatrix::diagonal(d1), SparseMatrix::diagonal(d2)};
}

EpssConfig preset_config(Preset preset, const SaddleSystem& sys, double alpha, double beta) {
  if (!(alpha > 0.0) || !(beta > 0.0)) {
    throw std::invalid_argument("preset_config: alpha and beta must be positive");
  }
  const std::size_t n = sys.n(), m = sys.m();
  EpssConfig cfg;
  cfg.preset = preset;
  cfg.alpha = alpha;
  cfg.beta = beta;
  auto& s = cfg.splitting;
  const SparseMatrix zero_b(m, n);

  if (preset == Preset::sepss) {
    s.a_p = sys.a();
    s.a_s = SparseMatrix(n, n);
    s.b_p = sys.b();
    s.b_s = zero_b;
    std::tie(s.c_p, s.c_s) = triangular_splitting(sys.c());
    std::tie(cfg.q1, cfg.q2) = diagonal_shift_bases(sys);
  } else {
    const Row* row = find_row(preset);
    if (!row) throw std::invalid_argument("preset_config: unknown preset");
    if (row->branch == Branch::hss) {
      std::tie(s.a_p, s.a_s) = hermitian_skew_splitting(sys.a());
    } else {
      s.a_p = sys.a();
      s.a_s = SparseMatrix(n, n);
    }
    if (row->branch == Branch::ss) {
      s.b_p = sys.b();
      s.b_s = zero_b;
    } else {
      s.b_p = zero_b;
      s.b_s = sys.b();
    }
    s.c_p = sys.c();
    s.c_s = SparseMatrix(m, m);
    switch (row->shifts) {
      case Shifts::single:
        cfg.beta = alpha;
        [[fallthrough]];
      case Shifts::two:
        cfg.q1 = SparseMatrix::identity(n);
        cfg.q2 = SparseMatrix::identity(m);
        break;
      case Shifts::diagonal:
        std::tie(cfg.q1, cfg.q2) = diagonal_shift_bases(sys);
        break;
    }
  }
  cfg.shifts.p_alpha = scaled(cfg.q1, cfg.alpha);
  cfg.shifts.p_beta = scaled(cfg.q2, cfg.beta);
  return cfg;
}

EpssConfig custom_config(const SaddleSystem& sys, SplittingSet splitting, ShiftPair shifts) {
  if (!check_splitting(sys, splitting).ok()) {
    throw std::invalid_argument("custom_config: splitting violates its invariants");
  }
  if (!check_shifts(sys, shifts)) {
    throw std::invalid_argument("custom_config: shifts must be symmetric positive definite");
  }
  EpssConfig cfg;
  cfg.splitting = std::move(splitting);
  cfg.shifts = std::move(shifts);
  cfg.q1 = cfg.shifts.p_alpha;
  cfg.q2 = cfg.shifts.p_beta;
  return cfg;
}

}  // namespace epss
