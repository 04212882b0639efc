#pragma once

#include <optional>
#include <string_view>
#include <utility>

#include "epss/saddle/splitting.hpp"
#include "epss/saddle/system.hpp"

namespace epss {

/// Named members of the EPSS family. `custom` marks hand-built configurations.
enum class Preset { hss, ghss, ehss, pss, gpss, epss, ss, gss, ess, sepss, custom };

inline constexpr Preset kAllPresets[] = {Preset::hss, Preset::ghss, Preset::ehss, Preset::pss,
                                         Preset::gpss, Preset::epss, Preset::ss,  Preset::gss,
                                         Preset::ess, Preset::sepss};

std::string_view to_string(Preset p);
/// Case-insensitive.
std::optional<Preset> parse_preset(std::string_view name);

/// HSS, PSS and SS use P_beta = alpha I; beta is ignored.
bool is_single_parameter(Preset p);
/// True for presets built with B_P = 0 (the HSS/PSS branch); the SS branch
/// and SEPSS have B_S = 0.
bool has_zero_b_p(Preset p);

struct EpssConfig {
  SplittingSet splitting;
  ShiftPair shifts;
  Preset preset = Preset::custom;
  double alpha = 1.0;
  double beta = 1.0;
  /// Shift bases: P_alpha = alpha Q1, P_beta = beta Q2 for preset-built configs.
  SparseMatrix q1;
  SparseMatrix q2;
};

/// Diagonal shift bases Q1 = diag(A + A^T), Q2 = 1e-4 I + diag(C + C^T).
std::pair<SparseMatrix, SparseMatrix> diagonal_shift_bases(const SaddleSystem& sys);

/// Configuration table for every named preset. Throws std::invalid_argument
/// for `custom` or non-positive parameters.
EpssConfig preset_config(Preset preset, const SaddleSystem& sys, double alpha, double beta);

/// Wraps a user splitting; validates the splitting and shift invariants.
EpssConfig custom_config(const SaddleSystem& sys, SplittingSet splitting, ShiftPair shifts);

}  // namespace epss
