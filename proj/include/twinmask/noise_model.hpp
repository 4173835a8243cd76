#pragma once

#include <functional>
#include <limits>
#include <string_view>

#include "twinmask/mask.hpp"
#include "twinmask/state.hpp"

namespace twinmask {

enum class Strategy { TwoBeam, SingleBeam, NoQuantum };

std::string_view to_string(Strategy s);

/// SQL-normalized noise of a homodyne signal and the variance of its
/// estimate; Gaussian statistics give variance = 2 m^2.
struct NoiseValue {
  double m = 0.0;
  double variance = 0.0;
  Strategy strategy = Strategy::TwoBeam;
};

/// Global LO phase offsets added to the per-mode overlap phases.
struct LoPhases {
  double a = 0.0;
  double b = 0.0;
};

/// Difference-signal noise, normalized to the two-beam SQL 2|alpha|^2.
NoiseValue m_tb(const OverlapSet& overlaps, const StateSpec& state, LoPhases phases = {});

/// Beam-a noise alone, normalized to |alpha|^2.
NoiseValue m_sb(const OverlapSet& overlaps, const StateSpec& state, double phase_a = 0.0);

/// Two-beam noise with every a-b cross moment set to zero.
NoiseValue m_nq(const OverlapSet& overlaps, const StateSpec& state, LoPhases phases = {});

NoiseValue noise(Strategy strategy, const OverlapSet& overlaps, const StateSpec& state, LoPhases phases = {});

struct SensitivityResult {
  double t_value = 0.0;
  double m = 0.0;
  double dm_dt = 0.0;
  double delta_t2 = std::numeric_limits<double>::infinity();
  Strategy strategy = Strategy::TwoBeam;
  bool infinite = true;  // dm_dt == 0, no information about T
};

/// Delta T^2 = 2 m^2 / (dM/dT)^2; a zero slope yields the infinite sentinel.
SensitivityResult sensitivity(Strategy strategy, double t_value, double m, double dm_dt);

/// Same, for a noise model given as a function of T. The slope is a central
/// difference with half-step `step`.
SensitivityResult sensitivity(Strategy strategy, const std::function<double(double)>& m_of_t, double at_t,
                              double step = 1e-4);

/// Single-beam thermal-state uncertainty, 2 (T var + 1 - T)^2 / (var - 1)^2.
double dt2_sb_closed(double var, double t_value);

/// Two-beam uncertainty with matched LOs (alpha_i ~ t_i), valid near T = 1.
double dt2_tb_matched(double var, double m0, double t_value);

/// Two-beam noise when every excited mode shares (var, m0) and
/// sum t_i^2 = T: 1 + (var-1)(T+1)/2 - (var-m0) sum t_i alpha_i.
double m_tb_uniform(double var, double m0, double t_value, double sum_t_alpha);

}  // namespace twinmask
