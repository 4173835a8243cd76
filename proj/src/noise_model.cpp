#include "twinmask/noise_model.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace twinmask {

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::TwoBeam: return "two_beam";
    case Strategy::SingleBeam: return "single_beam";
    case Strategy::NoQuantum: return "no_quantum";
  }
  return "unknown";
}

namespace {

NoiseValue two_beam(const OverlapSet& o, const StateSpec& state, LoPhases phases, bool keep_cross, Strategy tag) {
  validate(o);
  double sum = 0.0;
  for (std::size_t i = 0; i < o.size(); ++i) {
    const ModeNoise n = mode_noise(state, static_cast<int>(i) + 1, o.phi[i] + phases.a, o.theta[i] + phases.b);
    const double t = o.t[i];
    const double a = o.alpha[i];
    const double cross = keep_cross ? n.cross : 0.0;
    sum += t * t * n.var_a + a * a * n.var_b - 2.0 * t * a * cross - t * t;
  }
  const double m = 0.5 + 0.5 * sum;
  return {m, 2.0 * m * m, tag};
}

}  // namespace

NoiseValue m_tb(const OverlapSet& overlaps, const StateSpec& state, LoPhases phases) {
  return two_beam(overlaps, state, phases, true, Strategy::TwoBeam);
}

NoiseValue m_nq(const OverlapSet& overlaps, const StateSpec& state, LoPhases phases) {
  return two_beam(overlaps, state, phases, false, Strategy::NoQuantum);
}

NoiseValue m_sb(const OverlapSet& overlaps, const StateSpec& state, double phase_a) {
  validate(overlaps);
  double m = 1.0;
  for (std::size_t i = 0; i < overlaps.size(); ++i) {
    const ModeNoise n = mode_noise(state, static_cast<int>(i) + 1, overlaps.phi[i] + phase_a, 0.0);
    m += overlaps.t[i] * overlaps.t[i] * (n.var_a - 1.0);
  }
  return {m, 2.0 * m * m, Strategy::SingleBeam};
}

NoiseValue noise(Strategy strategy, const OverlapSet& overlaps, const StateSpec& state, LoPhases phases) {
  switch (strategy) {
    case Strategy::TwoBeam: return m_tb(overlaps, state, phases);
    case Strategy::SingleBeam: return m_sb(overlaps, state, phases.a);
    case Strategy::NoQuantum: return m_nq(overlaps, state, phases);
  }
  throw std::invalid_argument("unknown strategy");
}

SensitivityResult sensitivity(Strategy strategy, double t_value, double m, double dm_dt) {
  SensitivityResult r;
  r.strategy = strategy;
  r.t_value = t_value;
  r.m = m;
  r.dm_dt = dm_dt;
  if (dm_dt == 0.0 || !std::isfinite(dm_dt)) {
    r.infinite = true;
    r.delta_t2 = std::numeric_limits<double>::infinity();
    return r;
  }
  r.infinite = false;
  r.delta_t2 = 2.0 * m * m / (dm_dt * dm_dt);
  return r;
}

SensitivityResult sensitivity(Strategy strategy, const std::function<double(double)>& m_of_t, double at_t,
                              double step) {
  if (!(step > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
  const double slope = (m_of_t(at_t + step) - m_of_t(at_t - step)) / (2.0 * step);
  return sensitivity(strategy, at_t, m_of_t(at_t), slope);
}

double dt2_sb_closed(double var, double t_value) {
  if (var == 1.0) {
    throw std::invalid_argument("var = 1 is a coherent state: single-beam noise carries no information");
  }
  const double num = t_value * var + 1.0 - t_value;
  return 2.0 * num * num / ((var - 1.0) * (var - 1.0));
}

double dt2_tb_matched(double var, double m0, double t_value) {
  const double num = (1.0 - t_value) * (var + 1.0) + 2.0 * t_value * m0;
  const double den = 2.0 * m0 - (var + 1.0);
  return 2.0 * num * num / (den * den);
}

double m_tb_uniform(double var, double m0, double t_value, double sum_t_alpha) {
  return 1.0 + 0.5 * (var - 1.0) * (t_value + 1.0) - (var - m0) * sum_t_alpha;
}

}  // namespace twinmask
