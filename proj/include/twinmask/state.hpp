#pragma once

#include <map>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace twinmask {

/// SQL-normalized second moments of one spatial mode (vacuum = 1).
struct ModeNoise {
  double var_a = 1.0;
  double var_b = 1.0;
  double cross = 0.0;  // <X_a(phi) X_b(theta)>

  bool is_physical() const { return var_a >= 0.0 && var_b >= 0.0 && cross * cross <= var_a * var_b * (1.0 + 1e-12); }
  bool operator==(const ModeNoise&) const = default;
};

inline constexpr ModeNoise kVacuum{1.0, 1.0, 0.0};

/// Vacuum twin beams: phase-insensitive single-beam noise `var` and
/// quadrature-difference noise `m0` at the squeezing phases.
struct TwinBeam {
  double var = 5.0;
  double m0 = 0.1;
};

/// Thermal beam a, vacuum beam b.
struct Thermal {
  double var = 5.0;
};

struct Coherent {};

/// Phase-sensitive beam a with variance v_min along `axis`, v_max in quadrature.
struct PhaseSensitive {
  double v_min = 1.0;
  double v_max = 1.0;
  double axis = 0.0;
};

/// One separable component of a classically correlated mixture.
struct MixtureComponent {
  double weight = 1.0;
  double mean_a = 0.0;
  double mean_b = 0.0;
  double var_a = 1.0;
  double var_b = 1.0;
};

struct ClassicalMixture {
  std::vector<MixtureComponent> components;
};

using StateKind = std::variant<TwinBeam, Thermal, Coherent, PhaseSensitive, ClassicalMixture>;

/// The first `excited_modes` spatial modes carry `kind`; the rest are vacuum.
/// `overrides` replaces the noise of individual modes, keyed by 1-based rank.
struct StateSpec {
  StateKind kind = TwinBeam{};
  int excited_modes = 1;
  std::map<int, ModeNoise> overrides;
};

void validate(const StateSpec& state);

/// Noise of the mode with 1-based `mode_rank`, for LO phases `phase_a`, `phase_b`.
/// Twin-beam correlations are strongest at phase_a + phase_b = 0.
ModeNoise mode_noise(const StateSpec& state, int mode_rank, double phase_a = 0.0, double phase_b = 0.0);

/// Block-diagonal joint covariance of (X_a,i, X_b,i) over the first `modes` modes.
struct QuadratureCovariance {
  std::vector<Eigen::Matrix2d> blocks;

  /// Dense 2n x 2n matrix ordered (a1, b1, a2, b2, ...).
  Eigen::MatrixXd dense() const;
};

/// `phases_a[i]`, `phases_b[i]` are the quadrature angles of mode i+1; empty
/// spans mean the squeezing-optimal zero phases.
QuadratureCovariance quadrature_covariance(const StateSpec& state, int modes,
                                           const std::vector<double>& phases_a = {},
                                           const std::vector<double>& phases_b = {});

}  // namespace twinmask
