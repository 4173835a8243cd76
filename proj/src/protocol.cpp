#include "twinmask/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <boost/math/tools/roots.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "parallel.hpp"
#include "twinmask/errors.hpp"

namespace twinmask {

ModeBasis make_mode_basis(double waist, const TransverseGrid& grid, int mode_count) {
  ModeBasis basis;
  basis.grid = grid;
  basis.waist = waist;
  basis.indices = even_mode_sequence(mode_count);
  for (const auto& idx : basis.indices) basis.profiles.push_back(hermite_gauss(idx, waist, grid));
  return basis;
}

double sample_m(const CurveSample& s, Strategy strategy) {
  switch (strategy) {
    case Strategy::TwoBeam: return s.m_tb;
    case Strategy::SingleBeam: return s.m_sb;
    case Strategy::NoQuantum: return s.m_nq;
  }
  throw std::invalid_argument("unknown strategy");
}

double sample_t(const CurveSample& s, SlopeReference ref) {
  return ref == SlopeReference::TotalTransmission ? s.t_total : s.t_captured;
}

namespace {

void fill_noise(CurveSample& s, const StateSpec& state, LoPhases phases) {
  const OverlapSet& o = *s.overlaps;
  s.m_tb = m_tb(o, state, phases).m;
  s.m_sb = m_sb(o, state, phases.a).m;
  s.m_nq = m_nq(o, state, phases).m;
}

void require_ordered(std::span<const double> grid) {
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw std::invalid_argument("scan parameters must be strictly increasing");
  }
}

}  // namespace

TransmissionCurve scan_displacement(const MaskSpec& mask, const ModeBasis& basis, const StateSpec& state,
                                    std::span<const double> d_grid, const ScanOptions& options) {
  validate(mask);
  validate(state);
  if (d_grid.size() < 3) throw std::invalid_argument("a displacement scan needs at least 3 points");
  require_ordered(d_grid);
  if (!(options.lo_amplitude > 0.0)) throw std::invalid_argument("LO amplitude must be positive");

  const auto& grid = basis.grid;
  const FieldProfile fixed_b = [&] {
    if (options.lo_b == LoBMode::SingleMode) return basis.profiles.front();
    return square_lo(options.lo_b_position, options.lo_half_width, grid);
  }();

  TransmissionCurve curve;
  curve.kind = TransmissionCurve::Kind::Displacement;
  curve.state = state;
  curve.phases = options.phases;
  curve.slope_reference = options.slope_reference;
  curve.samples.resize(d_grid.size());

  detail::parallel_for(static_cast<std::int64_t>(d_grid.size()), options.threads,
                       [&](std::int64_t begin, std::int64_t end) {
                         for (auto k = begin; k < end; ++k) {
                           const double d = d_grid[k];
                           FieldProfile lo = square_lo(d, options.lo_half_width, grid);
                           lo.amplitude *= options.lo_amplitude;
                           // SQL normalization: divide the signal by the LO amplitude.
                           FieldProfile masked = masked_lo(lo, mask);
                           masked.amplitude /= std::sqrt(lo.norm2());
                           const FieldProfile lo_b =
                               options.lo_b == LoBMode::Comoving ? square_lo(d, options.lo_half_width, grid) : fixed_b;

                           CurveSample& s = curve.samples[k];
                           s.parameter = d;
                           s.overlaps = expansion_coeffs(masked, lo_b, basis.profiles, basis.indices);
                           s.t_total = lo_transmission(lo, mask);
                           s.overlaps->t_total = s.t_total;
                           s.t_captured = s.overlaps->t_captured;
                           fill_noise(s, state, options.phases);
                         }
                       });
  return curve;
}

TransmissionCurve reevaluate(const TransmissionCurve& curve, const StateSpec& state) {
  if (curve.kind != TransmissionCurve::Kind::Displacement) {
    throw std::invalid_argument("only displacement curves carry overlaps to reevaluate");
  }
  TransmissionCurve out = curve;
  out.state = state;
  for (auto& s : out.samples) fill_noise(s, state, out.phases);
  return out;
}

bool seeks_minimum(Strategy strategy, const StateSpec& state) {
  const ModeNoise n = mode_noise(state, 1);
  switch (strategy) {
    case Strategy::TwoBeam: return (n.var_a - 1.0) - 2.0 * n.cross < 0.0;
    case Strategy::NoQuantum: return n.var_a - 1.0 < 0.0;
    case Strategy::SingleBeam: return n.var_a - 1.0 < 0.0;
  }
  return true;
}

Optimum locate_optimum(const TransmissionCurve& curve, Strategy strategy) {
  const auto& s = curve.samples;
  if (s.size() < 3) throw std::invalid_argument("need at least 3 samples to locate an optimum");
  const bool minimum = seeks_minimum(strategy, curve.state);

  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& p : s) {
    lo = std::min(lo, sample_m(p, strategy));
    hi = std::max(hi, sample_m(p, strategy));
  }
  if (hi - lo <= 1e-12 * std::max(1.0, std::abs(hi))) {
    throw NoSignalError("noise is flat along the scan: the measurement carries no information");
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < s.size(); ++i) {
    const double m = sample_m(s[i], strategy);
    const double b = sample_m(s[best], strategy);
    const bool better = minimum ? m < b : m > b;
    const bool tie = m == b && std::abs(s[i].parameter) < std::abs(s[best].parameter);
    if (better || tie) best = i;
  }
  if (best == 0 || best + 1 == s.size()) {
    throw BoundaryExtremumError(
        fmt::format("noise extremum sits on the scan boundary at d = {}", s[best].parameter));
  }

  const double x0 = s[best - 1].parameter, x1 = s[best].parameter, x2 = s[best + 1].parameter;
  const double y0 = sample_m(s[best - 1], strategy), y1 = sample_m(s[best], strategy),
               y2 = sample_m(s[best + 1], strategy);
  const double denom = (x0 - x1) * (x0 - x2) * (x1 - x2);
  const double a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom;
  const double b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / denom;
  Optimum opt{x1, y1, best};
  if (a != 0.0 && std::isfinite(a)) {
    const double xv = std::clamp(-b / (2.0 * a), x0, x2);
    const double c = y1 - a * x1 * x1 - b * x1;
    opt.d_star = xv;
    opt.m_star = a * xv * xv + b * xv + c;
  }
  return opt;
}

namespace {

bool symmetric_steps(const std::vector<CurveSample>& s, std::size_t c, std::size_t k) {
  const double left = s[c].parameter - s[c - k].parameter;
  const double right = s[c + k].parameter - s[c].parameter;
  return std::abs(left - right) <= 1e-9 * std::max(std::abs(left), std::abs(right));
}

double curvature_ratio(const TransmissionCurve& curve, Strategy strategy, std::size_t c, std::size_t k,
                       double* t_curv) {
  const auto& s = curve.samples;
  const auto ref = curve.slope_reference;
  const double tpp = sample_t(s[c + k], ref) + sample_t(s[c - k], ref) - 2.0 * sample_t(s[c], ref);
  if (t_curv) *t_curv = tpp;
  if (std::abs(tpp) < 1e-12) {
    throw DegenerateParameterizationError(
        fmt::format("transmission curvature {} vanishes at d = {}", tpp, s[c].parameter));
  }
  const double mpp = sample_m(s[c + k], strategy) + sample_m(s[c - k], strategy) - 2.0 * sample_m(s[c], strategy);
  return mpp / tpp;
}

}  // namespace

DerivativeEstimate derivative_wrt_T(const TransmissionCurve& curve, Strategy strategy, std::size_t index) {
  const auto& s = curve.samples;
  if (index >= s.size() || s.size() < 2) throw std::invalid_argument("derivative index outside the curve");
  DerivativeEstimate est;
  est.coarse_value = std::numeric_limits<double>::quiet_NaN();

  if (curve.kind == TransmissionCurve::Kind::Direct) {
    const std::size_t lo = index == 0 ? 0 : index - 1;
    const std::size_t hi = index + 1 == s.size() ? index : index + 1;
    est.t_step = s[hi].parameter - s[lo].parameter;
    est.value = (sample_m(s[hi], strategy) - sample_m(s[lo], strategy)) / est.t_step;
    if (index >= 2 && index + 2 < s.size()) {
      est.coarse_value =
          (sample_m(s[index + 2], strategy) - sample_m(s[index - 2], strategy)) /
          (s[index + 2].parameter - s[index - 2].parameter);
    }
  } else {
    if (index == 0 || index + 1 >= s.size()) {
      throw std::invalid_argument("curvature-ratio derivative needs a neighbour on each side");
    }
    if (!symmetric_steps(s, index, 1)) throw std::invalid_argument("scan steps around the sample are not symmetric");
    est.value = curvature_ratio(curve, strategy, index, 1, &est.t_step);
    if (index >= 2 && index + 2 < s.size() && symmetric_steps(s, index, 2)) {
      est.coarse_value = curvature_ratio(curve, strategy, index, 2, nullptr);
    }
  }
  est.degenerate = std::abs(est.value) < 1e-12;
  return est;
}

SensitivityResult sensitivity(const TransmissionCurve& curve, Strategy strategy, std::size_t index) {
  const DerivativeEstimate d = derivative_wrt_T(curve, strategy, index);
  const auto& s = curve.samples.at(index);
  return sensitivity(strategy, sample_t(s, curve.slope_reference), sample_m(s, strategy),
                     d.degenerate ? 0.0 : d.value);
}

double default_scan_step(double aperture_half_width, const TransverseGrid& grid) {
  const double spacing = grid.spacing();
  const double cells = std::max(1.0, std::round(aperture_half_width / 50.0 / spacing));
  return cells * spacing;
}

double UniformModeModel::m_tb(double t) const { return m_tb_uniform(var, m0, t, t1_slope * t); }

double UniformModeModel::m_sb(double t) const { return (var - 1.0) * t + 1.0; }

// Cross moment zero: equivalent to m0 = var in the uniform formula.
double UniformModeModel::m_nq(double t) const { return m_tb_uniform(var, var, t, t1_slope * t); }

TransmissionCurve direct_curve(const UniformModeModel& model, std::span<const double> t_grid) {
  require_ordered(t_grid);
  TransmissionCurve curve;
  curve.kind = TransmissionCurve::Kind::Direct;
  curve.state = StateSpec{TwinBeam{model.var, model.m0}, 1, {}};
  for (double t : t_grid) {
    CurveSample s;
    s.parameter = t;
    s.t_total = t;
    s.t_captured = t;
    s.m_tb = model.m_tb(t);
    s.m_sb = model.m_sb(t);
    s.m_nq = model.m_nq(t);
    curve.samples.push_back(s);
  }
  return curve;
}

Fig2Table fig2_table(double var, double m0, std::span<const double> t_grid, double t1_slope) {
  if (!(var > 1.0) || !(m0 > 0.0)) throw std::invalid_argument("fig2 needs var > 1 and m0 > 0");
  const UniformModeModel model{var, m0, t1_slope};
  auto dt2_tb = [&](double t) {
    return sensitivity(Strategy::TwoBeam, [&](double x) { return model.m_tb(x); }, t).delta_t2;
  };

  Fig2Table table;
  for (double t : t_grid) table.rows.push_back({t, dt2_sb_closed(var, t), dt2_tb(t)});

  auto gap = [&](double t) { return dt2_tb(t) - dt2_sb_closed(var, t); };
  if (gap(0.0) * gap(1.0) < 0.0) {
    boost::uintmax_t iters = 200;
    const auto [a, b] = boost::math::tools::toms748_solve(gap, 0.0, 1.0, boost::math::tools::eps_tolerance<double>(52),
                                                          iters);
    table.crossover = 0.5 * (a + b);
  }
  return table;
}

std::vector<EnhancementPoint> fig3_curve(int n_max, double var, double m0, double waist, const BinarySquare& aperture,
                                         const Fig3Options& options) {
  if (n_max < 1 || n_max > 25) throw std::invalid_argument("fig3 mode count must be in [1, 25]");
  const TransverseGrid grid = options.grid.value_or(default_grid(waist, aperture.half_width));
  const ModeBasis basis = make_mode_basis(waist, grid, 25);
  const double h = options.step.value_or(default_scan_step(aperture.half_width, grid));
  const double c = aperture.center[0];
  const std::vector<double> d_grid{c - 2 * h, c - h, c, c + h, c + 2 * h};

  ScanOptions scan;
  scan.lo_half_width = aperture.half_width;
  scan.lo_b = options.lo_b;
  scan.lo_b_position = c;
  scan.slope_reference = options.slope_reference;
  scan.threads = options.threads;
  const TransmissionCurve base = scan_displacement(aperture, basis, StateSpec{TwinBeam{var, m0}, 25, {}}, d_grid, scan);

  constexpr std::size_t center = 2;
  std::vector<EnhancementPoint> points;
  for (int n = 1; n <= n_max; ++n) {
    const TransmissionCurve twin = reevaluate(base, StateSpec{TwinBeam{var, m0}, n, {}});
    const TransmissionCurve thermal = reevaluate(base, StateSpec{Thermal{var}, n, {}});
    const auto tb = sensitivity(twin, Strategy::TwoBeam, center);
    const auto nq = sensitivity(twin, Strategy::NoQuantum, center);
    const auto sb = sensitivity(thermal, Strategy::SingleBeam, center);

    EnhancementPoint p;
    p.n_modes = n;
    p.dt2_tb = tb.delta_t2;
    p.dt2_sb = sb.delta_t2;
    p.dt2_nq = nq.delta_t2;
    p.ratio = sb.delta_t2 / tb.delta_t2;
    for (const auto& [curve, strategy] : {std::pair{&twin, Strategy::TwoBeam}, std::pair{&thermal, Strategy::SingleBeam}}) {
      const auto d = derivative_wrt_T(*curve, strategy, center);
      p.slope_consistency = std::max(p.slope_consistency, std::abs(d.coarse_value - d.value) / std::abs(d.value));
    }
    points.push_back(p);
  }
  return points;
}

EstimateReport estimate_shape(const MaskSpec& mask, const ModeBasis& basis, const StateSpec& state,
                              std::span<const double> d_grid, const ScanOptions& options, const McConfig& mc,
                              Strategy locate_with) {
  if (mc.enabled && mc.shots < 10'000) {
    throw std::invalid_argument(fmt::format("Monte Carlo estimation needs >= 10^4 shots, got {}", mc.shots));
  }
  EstimateReport report;
  report.curve = scan_displacement(mask, basis, state, d_grid, options);
  report.located_with = locate_with;
  report.monte_carlo = mc.enabled;

  double t_max = 0.0;
  for (const auto& s : report.curve.samples) t_max = std::max(t_max, s.t_total);
  if (t_max < 1e-12) throw NoSignalError("the mask blocks the LO at every scan position");

  if (mc.enabled) {
    for (auto& s : report.curve.samples) {
      s.m_tb = sample_difference_signal(*s.overlaps, state, mc.shots, mc.seed, options.phases, mc.threads).empirical_m;
      s.m_sb = sample_single_signal(*s.overlaps, state, mc.shots, mc.seed, options.phases.a, mc.threads).empirical_m;
    }
  }

  report.optimum = locate_optimum(report.curve, locate_with);
  const std::size_t at = report.optimum.index;
  report.tb = sensitivity(report.curve, Strategy::TwoBeam, at);
  report.sb = sensitivity(report.curve, Strategy::SingleBeam, at);
  report.nq = sensitivity(report.curve, Strategy::NoQuantum, at);
  report.enhancement = report.sb.delta_t2 / report.tb.delta_t2;
  return report;
}

std::vector<double> linspace(double lo, double hi, int count) {
  if (count < 2) throw std::invalid_argument("linspace needs at least 2 points");
  std::vector<double> v(count);
  for (int i = 0; i < count; ++i) v[i] = lo + (hi - lo) * i / (count - 1);
  return v;
}

void write_scan_csv(std::ostream& out, const TransmissionCurve& curve) {
  out << "d,T_total,T_captured,m_tb,m_sb\n";
  for (const auto& s : curve.samples) {
    fmt::print(out, "{:.12g},{:.12g},{:.12g},{:.12g},{:.12g}\n", s.parameter, s.t_total, s.t_captured, s.m_tb, s.m_sb);
  }
}

void write_fig2_csv(std::ostream& out, const Fig2Table& table) {
  out << "T,dt2_sb,dt2_tb\n";
  for (const auto& r : table.rows) fmt::print(out, "{:.12g},{:.12g},{:.12g}\n", r.t, r.dt2_sb, r.dt2_tb);
}

void write_fig3_csv(std::ostream& out, std::span<const EnhancementPoint> points) {
  out << "n,ratio\n";
  for (const auto& p : points) fmt::print(out, "{},{:.12g}\n", p.n_modes, p.ratio);
}

}  // namespace twinmask
