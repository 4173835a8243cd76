#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "twinmask/mask.hpp"
#include "twinmask/noise_model.hpp"
#include "twinmask/state.hpp"

namespace twinmask {

/// Simulated homodyne record. Samples are SQL-normalized so that
/// <sample^2> estimates the noise M of the strategy that produced them.
struct McRun {
  std::uint64_t seed = 0;
  std::int64_t shots = 0;
  std::vector<double> samples;
  double empirical_m = 0.0;   // mean of sample^2
  double empirical_m4 = 0.0;  // mean of sample^4
  double stderr_m = 0.0;
  double mean = 0.0;
  double stderr_mean = 0.0;
};

/// Recomputes the summary statistics of `samples` with a fixed-order reduction.
McRun summarize(std::uint64_t seed, std::vector<double> samples);

/// Difference signal (I_a - I_b) / sqrt(2) per shot. Shot k draws from its own
/// stream derived from (seed, k), so output does not depend on `threads`.
McRun sample_difference_signal(const OverlapSet& overlaps, const StateSpec& state, std::int64_t shots,
                               std::uint64_t seed, LoPhases phases = {}, int threads = 0);

/// Beam-a signal I_a alone, normalized to the single-beam SQL.
McRun sample_single_signal(const OverlapSet& overlaps, const StateSpec& state, std::int64_t shots,
                           std::uint64_t seed, double phase_a = 0.0, int threads = 0);

struct MomentReport {
  int batches = 0;
  std::int64_t batch_size = 0;
  double observed = 0.0;   // variance of the per-batch noise estimates
  double predicted = 0.0;  // 2 M^2 / batch_size
  double z = 0.0;
  double m4_ratio = 0.0;   // <X^4> / (3 <X^2>^2)
};

/// Checks Delta M^2 = 2 M^2 by batching the shots. Needs >= 10^4 shots.
MomentReport validate_variance_of_variance(const McRun& run, int batches = 100);

/// `shot_index,value` rows.
void write_samples_csv(std::ostream& out, const McRun& run);

}  // namespace twinmask
