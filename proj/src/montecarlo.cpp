#include "twinmask/montecarlo.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "parallel.hpp"

namespace twinmask {

namespace {

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// SplitMix64 stream keyed by (seed, shot).
class ShotRng {
 public:
  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  ShotRng(std::uint64_t seed, std::uint64_t shot) : state_(mix64(seed + mix64(shot + 0x9e3779b97f4a7c15ULL))) {}

  result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

 private:
  std::uint64_t state_;
};

struct ModeDraw {
  double t = 0.0;
  double alpha = 0.0;
  // Lower Cholesky factor of [[var_a, cross], [cross, var_b]].
  double l11 = 0.0, l21 = 0.0, l22 = 0.0;
};

ModeDraw factor(double t, double alpha, const ModeNoise& n) {
  if (!n.is_physical()) throw std::invalid_argument("mode covariance is not positive semidefinite");
  ModeDraw d{t, alpha};
  d.l11 = std::sqrt(n.var_a);
  d.l21 = d.l11 > 0.0 ? n.cross / d.l11 : 0.0;
  d.l22 = std::sqrt(std::max(0.0, n.var_b - d.l21 * d.l21));
  return d;
}

McRun run_shots(const std::vector<ModeDraw>& modes, double vacuum_weight, double scale, std::int64_t shots,
                std::uint64_t seed, int threads) {
  if (shots < 1) throw std::invalid_argument("need at least one shot");
  const double vacuum_amp = std::sqrt(std::max(0.0, vacuum_weight));
  std::vector<double> samples(static_cast<std::size_t>(shots));
  detail::parallel_for(shots, threads, [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t k = begin; k < end; ++k) {
      ShotRng rng(seed, static_cast<std::uint64_t>(k));
      std::normal_distribution<double> gauss;
      double y = 0.0;
      for (const auto& m : modes) {
        const double z1 = gauss(rng);
        const double z2 = gauss(rng);
        const double xa = m.l11 * z1;
        const double xb = m.l21 * z1 + m.l22 * z2;
        y += m.t * xa - m.alpha * xb;
      }
      y += vacuum_amp * gauss(rng);
      samples[static_cast<std::size_t>(k)] = scale * y;
    }
  });
  return summarize(seed, std::move(samples));
}

}  // namespace

McRun summarize(std::uint64_t seed, std::vector<double> samples) {
  McRun r;
  r.seed = seed;
  r.shots = static_cast<std::int64_t>(samples.size());
  if (samples.empty()) throw std::invalid_argument("no samples to summarize");
  const auto n = static_cast<double>(samples.size());
  std::vector<double> sq(samples.size()), quart(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    sq[i] = samples[i] * samples[i];
    quart[i] = sq[i] * sq[i];
  }
  r.mean = detail::pairwise_sum(samples) / n;
  r.empirical_m = detail::pairwise_sum(sq) / n;
  r.empirical_m4 = detail::pairwise_sum(quart) / n;
  if (samples.size() > 1) {
    const double var_y = (r.empirical_m - r.mean * r.mean) * n / (n - 1.0);
    const double var_sq = (r.empirical_m4 - r.empirical_m * r.empirical_m) * n / (n - 1.0);
    r.stderr_mean = std::sqrt(std::max(0.0, var_y) / n);
    r.stderr_m = std::sqrt(std::max(0.0, var_sq) / n);
  }
  r.samples = std::move(samples);
  return r;
}

McRun sample_difference_signal(const OverlapSet& overlaps, const StateSpec& state, std::int64_t shots,
                               std::uint64_t seed, LoPhases phases, int threads) {
  validate(overlaps);
  std::vector<ModeDraw> modes;
  for (std::size_t i = 0; i < overlaps.size(); ++i) {
    const ModeNoise n =
        mode_noise(state, static_cast<int>(i) + 1, overlaps.phi[i] + phases.a, overlaps.theta[i] + phases.b);
    modes.push_back(factor(overlaps.t[i], overlaps.alpha[i], n));
  }
  // Raw variance is 2 M_TB; dividing by sqrt(2) applies the two-beam SQL.
  return run_shots(modes, 1.0 - overlaps.t_captured, 1.0 / std::sqrt(2.0), shots, seed, threads);
}

McRun sample_single_signal(const OverlapSet& overlaps, const StateSpec& state, std::int64_t shots,
                           std::uint64_t seed, double phase_a, int threads) {
  validate(overlaps);
  std::vector<ModeDraw> modes;
  for (std::size_t i = 0; i < overlaps.size(); ++i) {
    const ModeNoise n = mode_noise(state, static_cast<int>(i) + 1, overlaps.phi[i] + phase_a, 0.0);
    modes.push_back(factor(overlaps.t[i], 0.0, n));
  }
  return run_shots(modes, 1.0 - overlaps.t_captured, 1.0, shots, seed, threads);
}

MomentReport validate_variance_of_variance(const McRun& run, int batches) {
  if (run.shots < 10'000 || run.samples.size() != static_cast<std::size_t>(run.shots)) {
    throw std::invalid_argument(
        fmt::format("variance-of-variance check needs >= 10^4 retained shots, got {}", run.samples.size()));
  }
  if (batches < 10) throw std::invalid_argument("need at least 10 batches");
  if (!(run.empirical_m > 0.0)) {
    throw std::invalid_argument("degenerate run: signal has zero variance");
  }
  MomentReport rep;
  rep.batches = batches;
  rep.batch_size = run.shots / batches;
  const auto b = static_cast<std::size_t>(rep.batch_size);

  std::vector<double> batch_m(batches);
  std::vector<double> sq(b);
  for (int j = 0; j < batches; ++j) {
    for (std::size_t i = 0; i < b; ++i) {
      const double y = run.samples[j * b + i];
      sq[i] = y * y;
    }
    batch_m[j] = detail::pairwise_sum(sq) / static_cast<double>(b);
  }
  const double mean_b = detail::pairwise_sum(batch_m) / batches;
  for (auto& v : batch_m) v = (v - mean_b) * (v - mean_b);
  rep.observed = detail::pairwise_sum(batch_m) / (batches - 1);

  const double m = run.empirical_m;
  rep.predicted = 2.0 * m * m / static_cast<double>(b);
  // Spread of a sample variance over k near-Gaussian batch means; y^2 has
  // excess kurtosis 12, reduced by the batch size.
  const double rel_sd = std::sqrt(2.0 / (batches - 1) + 12.0 / (static_cast<double>(b) * batches));
  rep.z = (rep.observed - rep.predicted) / (rep.predicted * rel_sd);
  rep.m4_ratio = run.empirical_m4 / (3.0 * m * m);
  return rep;
}

void write_samples_csv(std::ostream& out, const McRun& run) {
  out << "shot_index,value\n";
  for (std::size_t i = 0; i < run.samples.size(); ++i) fmt::print(out, "{},{:.12g}\n", i, run.samples[i]);
}

}  // namespace twinmask
