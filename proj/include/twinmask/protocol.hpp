#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "twinmask/basis.hpp"
#include "twinmask/mask.hpp"
#include "twinmask/montecarlo.hpp"
#include "twinmask/noise_model.hpp"
#include "twinmask/state.hpp"

namespace twinmask {

/// Truncated HG basis: profiles[i] is the mode labelled indices[i], and the
/// state's mode rank i+1 refers to it.
struct ModeBasis {
  TransverseGrid grid;
  double waist = 1.0;
  std::vector<ModeIndex> indices;
  std::vector<FieldProfile> profiles;
};

ModeBasis make_mode_basis(double waist, const TransverseGrid& grid, int mode_count = 25);

/// How the beam-b LO behaves while the beam-a LO is scanned.
enum class LoBMode {
  Fixed,       // square held at `lo_b_position`
  Comoving,    // square follows the beam-a LO
  SingleMode,  // projects on the first basis mode only (alpha_1 = 1)
};

/// Which transmission plays the role of T in dM/dT.
enum class SlopeReference { TotalTransmission, CapturedTransmission };

struct ScanOptions {
  double lo_half_width = 1.0;
  LoBMode lo_b = LoBMode::Fixed;
  double lo_b_position = 0.0;
  // Overall LO amplitude; the SQL normalization removes it.
  double lo_amplitude = 1.0;
  LoPhases phases;
  SlopeReference slope_reference = SlopeReference::TotalTransmission;
  int threads = 0;
};

struct CurveSample {
  double parameter = 0.0;  // displacement d, or T for direct curves
  double t_total = 0.0;
  double t_captured = 0.0;
  std::optional<OverlapSet> overlaps;
  double m_tb = 0.0;
  double m_sb = 0.0;
  double m_nq = 0.0;
};

/// Noise values along a one-parameter family of measurements, ordered by
/// strictly increasing parameter.
struct TransmissionCurve {
  enum class Kind { Displacement, Direct };
  Kind kind = Kind::Displacement;
  std::vector<CurveSample> samples;
  StateSpec state;
  LoPhases phases;
  SlopeReference slope_reference = SlopeReference::TotalTransmission;
};

double sample_m(const CurveSample& s, Strategy strategy);
double sample_t(const CurveSample& s, SlopeReference ref);

/// Scans the beam-a square LO along x over `d_grid`.
TransmissionCurve scan_displacement(const MaskSpec& mask, const ModeBasis& basis, const StateSpec& state,
                                    std::span<const double> d_grid, const ScanOptions& options);

/// Recomputes the noise values of a displacement curve for another state.
TransmissionCurve reevaluate(const TransmissionCurve& curve, const StateSpec& state);

struct Optimum {
  double d_star = 0.0;
  double m_star = 0.0;
  std::size_t index = 0;  // discrete extremum
};

/// True when the protocol looks for a noise minimum for this strategy/state.
bool seeks_minimum(Strategy strategy, const StateSpec& state);

/// Parabolic refinement around the discrete extremum.
Optimum locate_optimum(const TransmissionCurve& curve, Strategy strategy);

struct DerivativeEstimate {
  double value = 0.0;         // dM/dT
  double coarse_value = 0.0;  // same rule at twice the step, NaN if unavailable
  double t_step = 0.0;        // T'' for displacement curves, 2 dT for direct ones
  bool degenerate = false;    // |dM/dT| ~ 0
};

/// dM/dT at sample `index`. Displacement curves use the ratio of second
/// central differences M''/T''; direct curves use first differences in T.
DerivativeEstimate derivative_wrt_T(const TransmissionCurve& curve, Strategy strategy, std::size_t index);

SensitivityResult sensitivity(const TransmissionCurve& curve, Strategy strategy, std::size_t index);

/// Scan half-width helper: the default step is aperture_half_width / 50,
/// rounded to a whole number of grid spacings.
double default_scan_step(double aperture_half_width, const TransverseGrid& grid);

/// Uniform-mode model: every excited mode shares (var, m0), beam-b LO selects
/// one mode (alpha_1 = 1) and t_1 = t1_slope * T.
struct UniformModeModel {
  double var = 5.0;
  double m0 = 0.1;
  double t1_slope = 0.8;

  double m_tb(double t) const;
  double m_sb(double t) const;
  double m_nq(double t) const;
};

TransmissionCurve direct_curve(const UniformModeModel& model, std::span<const double> t_grid);

struct Fig2Row {
  double t = 0.0;
  double dt2_sb = 0.0;
  double dt2_tb = 0.0;
};

struct Fig2Table {
  std::vector<Fig2Row> rows;
  std::optional<double> crossover;  // T where the two uncertainties are equal
};

Fig2Table fig2_table(double var, double m0, std::span<const double> t_grid, double t1_slope = 0.8);

struct EnhancementPoint {
  int n_modes = 0;
  double ratio = 0.0;  // dT^2_SB / dT^2_TB at T = 1
  double dt2_sb = 0.0;
  double dt2_tb = 0.0;
  double dt2_nq = 0.0;
  double slope_consistency = 0.0;  // worst relative change of dM/dT between h and 2h
};

struct Fig3Options {
  std::optional<TransverseGrid> grid;  // default_grid(waist, half_width) when empty
  LoBMode lo_b = LoBMode::Fixed;
  SlopeReference slope_reference = SlopeReference::TotalTransmission;
  std::optional<double> step;  // default_scan_step when empty
  int threads = 0;
};

std::vector<EnhancementPoint> fig3_curve(int n_max, double var, double m0, double waist, const BinarySquare& aperture,
                                         const Fig3Options& options = {});

struct McConfig {
  bool enabled = false;
  std::int64_t shots = 100'000;
  std::uint64_t seed = 1;
  int threads = 0;
};

struct EstimateReport {
  Optimum optimum;
  Strategy located_with = Strategy::TwoBeam;
  SensitivityResult tb, sb, nq;
  double enhancement = 0.0;  // dT^2_SB / dT^2_TB at the optimum
  bool monte_carlo = false;
  TransmissionCurve curve;
};

/// Scan, locate the optimum, and evaluate sensitivities there. With Monte
/// Carlo enabled the two-beam and single-beam noise values come from
/// simulated records (one seed shared across the scan).
EstimateReport estimate_shape(const MaskSpec& mask, const ModeBasis& basis, const StateSpec& state,
                              std::span<const double> d_grid, const ScanOptions& options, const McConfig& mc,
                              Strategy locate_with = Strategy::TwoBeam);

/// Evenly spaced points from `lo` to `hi` inclusive.
std::vector<double> linspace(double lo, double hi, int count);

void write_scan_csv(std::ostream& out, const TransmissionCurve& curve);
void write_fig2_csv(std::ostream& out, const Fig2Table& table);
void write_fig3_csv(std::ostream& out, std::span<const EnhancementPoint> points);

}  // namespace twinmask
