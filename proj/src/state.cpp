#include "twinmask/state.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace twinmask {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

ModeNoise mixture_noise(const ClassicalMixture& mix) {
  double mean_a = 0.0, mean_b = 0.0, second_a = 0.0, second_b = 0.0, second_ab = 0.0;
  for (const auto& c : mix.components) {
    mean_a += c.weight * c.mean_a;
    mean_b += c.weight * c.mean_b;
    second_a += c.weight * (c.var_a + c.mean_a * c.mean_a);
    second_b += c.weight * (c.var_b + c.mean_b * c.mean_b);
    // Each component is a product state, so its a-b moment factorizes.
    second_ab += c.weight * c.mean_a * c.mean_b;
  }
  return {second_a - mean_a * mean_a, second_b - mean_b * mean_b, second_ab - mean_a * mean_b};
}

}  // namespace

void validate(const StateSpec& state) {
  if (state.excited_modes < 0) throw std::invalid_argument("excited mode count must be non-negative");
  std::visit(overloaded{
                 [](const TwinBeam& s) {
                   if (!(s.var >= 0.0) || !(s.m0 > 0.0)) {
                     throw std::invalid_argument(
                         fmt::format("twin beam needs var >= 0 and m0 > 0, got var={} m0={}", s.var, s.m0));
                   }
                   if (s.m0 > 2.0 * s.var) {
                     throw std::invalid_argument("twin beam m0 > 2 var implies |cross| > var");
                   }
                 },
                 [](const Thermal& s) {
                   if (!(s.var >= 0.0)) throw std::invalid_argument(fmt::format("thermal var must be >= 0, got {}", s.var));
                 },
                 [](const Coherent&) {},
                 [](const PhaseSensitive& s) {
                   if (!(s.v_min >= 0.0) || !(s.v_max >= 0.0)) {
                     throw std::invalid_argument("phase-sensitive variances must be non-negative");
                   }
                 },
                 [](const ClassicalMixture& s) {
                   if (s.components.empty()) throw std::invalid_argument("classical mixture has no components");
                   double w = 0.0;
                   for (const auto& c : s.components) {
                     if (!(c.weight >= 0.0) || !(c.var_a >= 0.0) || !(c.var_b >= 0.0)) {
                       throw std::invalid_argument("mixture weights and variances must be non-negative");
                     }
                     w += c.weight;
                   }
                   if (std::abs(w - 1.0) > 1e-9) {
                     throw std::invalid_argument(fmt::format("mixture weights sum to {}, expected 1", w));
                   }
                 },
             },
             state.kind);
  for (const auto& [rank, noise] : state.overrides) {
    if (rank < 1) throw std::invalid_argument("mode override rank must be >= 1");
    if (!noise.is_physical()) throw std::invalid_argument(fmt::format("mode override {} is unphysical", rank));
  }
}

ModeNoise mode_noise(const StateSpec& state, int mode_rank, double phase_a, double phase_b) {
  if (mode_rank < 1) throw std::invalid_argument("mode rank is 1-based");
  validate(state);
  if (mode_rank > state.excited_modes) return kVacuum;
  if (auto it = state.overrides.find(mode_rank); it != state.overrides.end()) return it->second;

  return std::visit(overloaded{
                        [&](const TwinBeam& s) {
                          return ModeNoise{s.var, s.var, (s.var - s.m0) * std::cos(phase_a + phase_b)};
                        },
                        [](const Thermal& s) { return ModeNoise{s.var, 1.0, 0.0}; },
                        [](const Coherent&) { return kVacuum; },
                        [&](const PhaseSensitive& s) {
                          const double c = std::cos(phase_a - s.axis);
                          const double sn = std::sin(phase_a - s.axis);
                          return ModeNoise{s.v_min * c * c + s.v_max * sn * sn, 1.0, 0.0};
                        },
                        [](const ClassicalMixture& s) { return mixture_noise(s); },
                    },
                    state.kind);
}

Eigen::MatrixXd QuadratureCovariance::dense() const {
  const auto n = static_cast<Eigen::Index>(blocks.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (Eigen::Index i = 0; i < n; ++i) m.block<2, 2>(2 * i, 2 * i) = blocks[i];
  return m;
}

QuadratureCovariance quadrature_covariance(const StateSpec& state, int modes, const std::vector<double>& phases_a,
                                           const std::vector<double>& phases_b) {
  if (modes < 1) throw std::invalid_argument("covariance needs at least one mode");
  QuadratureCovariance cov;
  cov.blocks.reserve(modes);
  for (int i = 0; i < modes; ++i) {
    const double pa = phases_a.empty() ? 0.0 : phases_a.at(i);
    const double pb = phases_b.empty() ? 0.0 : phases_b.at(i);
    const ModeNoise n = mode_noise(state, i + 1, pa, pb);
    if (!n.is_physical()) {
      throw std::invalid_argument(fmt::format("mode {} noise violates cross^2 <= var_a var_b", i + 1));
    }
    Eigen::Matrix2d b;
    b << n.var_a, n.cross, n.cross, n.var_b;
    cov.blocks.push_back(b);
  }
  return cov;
}

}  // namespace twinmask
