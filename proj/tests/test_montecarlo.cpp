#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "twinmask/montecarlo.hpp"

using namespace twinmask;

namespace {

OverlapSet matched() {
  std::vector<double> one = {1.0};
  return make_overlaps(one, one, 1.0);
}

void expect_within_3_sigma(const McRun& run, double expected) {
  EXPECT_LT(std::abs(run.empirical_m - expected), 3.0 * run.stderr_m)
      << "empirical " << run.empirical_m << " expected " << expected << " stderr " << run.stderr_m;
}

}  // namespace

TEST(MonteCarlo, CoherentDifferenceSignal) {
  std::vector<double> t = {0.5, -0.3, 0.2};
  std::vector<double> a = {0.2, 0.9, -0.4};
  auto run = sample_difference_signal(make_overlaps(t, a, 0.6), StateSpec{Coherent{}, 3}, 100'000, 42);
  expect_within_3_sigma(run, 1.0);
}

TEST(MonteCarlo, MatchedTwinBeam) {
  auto run = sample_difference_signal(matched(), StateSpec{TwinBeam{5.0, 0.1}, 1}, 100'000, 7);
  expect_within_3_sigma(run, 0.1);
  EXPECT_NEAR(run.empirical_m4 / (3.0 * run.empirical_m * run.empirical_m), 1.0, 0.05);
}

TEST(MonteCarlo, SingleBeamExamples) {
  std::vector<double> one = {1.0};
  std::vector<double> zero = {0.0};
  expect_within_3_sigma(sample_single_signal(make_overlaps(one, one, 1.0), StateSpec{Thermal{5.0}, 1}, 100'000, 3),
                        5.0);
  expect_within_3_sigma(sample_single_signal(make_overlaps(zero, one, 0.0), StateSpec{Thermal{5.0}, 1}, 100'000, 3),
                        1.0);
  expect_within_3_sigma(sample_single_signal(make_overlaps(one, one, 1.0), StateSpec{Coherent{}, 1}, 100'000, 3),
                        1.0);
}

TEST(MonteCarlo, AgreesWithAnalyticOnRandomConfigurations) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 8; ++trial) {
    const int n = 1 + trial % 4;
    std::vector<double> t(n), a(n);
    double t2 = 0.0;
    for (int i = 0; i < n; ++i) {
      t[i] = u(rng);
      a[i] = u(rng);
      t2 += t[i] * t[i];
    }
    const double total = 0.3 + 0.7 * std::abs(u(rng));
    for (double& x : t) x *= std::sqrt(total * 0.9 / t2);
    auto o = make_overlaps(t, a, total);
    StateSpec st{TwinBeam{2.0 + 6.0 * std::abs(u(rng)), 0.05 + 0.5 * std::abs(u(rng))}, n};
    const auto seed = 1000u + static_cast<unsigned>(trial);
    expect_within_3_sigma(sample_difference_signal(o, st, 50'000, seed), m_tb(o, st).m);
    expect_within_3_sigma(sample_single_signal(o, st, 50'000, seed), m_sb(o, st).m);
  }
}

TEST(MonteCarlo, PhaseOffsetsFollowAnalyticModel) {
  auto o = matched();
  StateSpec st{TwinBeam{5.0, 0.1}, 1};
  const LoPhases ph{0.6, 0.3};
  expect_within_3_sigma(sample_difference_signal(o, st, 100'000, 5, ph), m_tb(o, st, ph).m);
}

TEST(MonteCarlo, ReproducibleAndThreadIndependent) {
  std::vector<double> t = {0.7, 0.4};
  std::vector<double> a = {0.8, 0.6};
  auto o = make_overlaps(t, a, 0.8);
  StateSpec st{TwinBeam{}, 2};
  auto r1 = sample_difference_signal(o, st, 20'000, 123, {}, 1);
  auto r2 = sample_difference_signal(o, st, 20'000, 123, {}, 1);
  auto r4 = sample_difference_signal(o, st, 20'000, 123, {}, 4);
  auto r7 = sample_difference_signal(o, st, 20'000, 123, {}, 7);
  EXPECT_EQ(r1.samples, r2.samples);
  EXPECT_EQ(r1.samples, r4.samples);
  EXPECT_EQ(r1.samples, r7.samples);
  EXPECT_EQ(r1.empirical_m, r7.empirical_m);
  auto other = sample_difference_signal(o, st, 20'000, 124, {}, 1);
  EXPECT_NE(r1.samples, other.samples);
  // A longer run extends the same per-shot streams.
  auto longer = sample_difference_signal(o, st, 30'000, 123, {}, 3);
  EXPECT_TRUE(std::equal(r1.samples.begin(), r1.samples.end(), longer.samples.begin()));
}

TEST(MonteCarlo, MeanIsZero) {
  std::vector<double> t = {0.7, 0.4};
  std::vector<double> a = {0.8, 0.6};
  auto run = sample_difference_signal(make_overlaps(t, a, 0.8), StateSpec{TwinBeam{}, 2}, 100'000, 77);
  EXPECT_LT(std::abs(run.mean), 3.0 * run.stderr_mean);
}

TEST(MonteCarlo, StderrScalesAsInverseRootShots) {
  auto st = StateSpec{Thermal{5.0}, 1};
  std::vector<double> one = {1.0};
  auto o = make_overlaps(one, one, 1.0);
  auto small = sample_single_signal(o, st, 50'000, 10);
  auto big = sample_single_signal(o, st, 100'000, 11);
  EXPECT_NEAR(small.stderr_m / big.stderr_m, std::sqrt(2.0), 0.1 * std::sqrt(2.0));
}

TEST(MonteCarlo, RejectsBadInput) {
  EXPECT_THROW(sample_difference_signal(matched(), StateSpec{TwinBeam{}, 1}, 0, 1), std::invalid_argument);
  StateSpec bad{Coherent{}, 1};
  bad.overrides[1] = ModeNoise{1.0, 1.0, 3.0};
  EXPECT_THROW(sample_difference_signal(matched(), bad, 100, 1), std::invalid_argument);
}

TEST(VarianceOfVariance, TwinBeamMatched) {
  auto run = sample_difference_signal(matched(), StateSpec{TwinBeam{5.0, 0.1}, 1}, 100'000, 2024);
  auto rep = validate_variance_of_variance(run);
  EXPECT_EQ(rep.batches, 100);
  EXPECT_EQ(rep.batch_size, 1000);
  EXPECT_LT(std::abs(rep.z), 3.0);
  EXPECT_NEAR(rep.m4_ratio, 1.0, 0.05);
}

TEST(VarianceOfVariance, ThermalSingleBeam) {
  std::vector<double> one = {1.0};
  auto run = sample_single_signal(make_overlaps(one, one, 1.0), StateSpec{Thermal{5.0}, 1}, 100'000, 31);
  EXPECT_LT(std::abs(validate_variance_of_variance(run).z), 3.0);
}

TEST(VarianceOfVariance, ZStatisticIsCalibrated) {
  // Across independent seeds the z values should look standard normal.
  double sum = 0.0, sum2 = 0.0;
  const int reps = 40;
  for (int k = 0; k < reps; ++k) {
    auto run = sample_difference_signal(matched(), StateSpec{TwinBeam{5.0, 0.1}, 1}, 20'000, 500 + k);
    const double z = validate_variance_of_variance(run, 50).z;
    sum += z;
    sum2 += z * z;
  }
  const double mean = sum / reps;
  const double sd = std::sqrt(sum2 / reps - mean * mean);
  EXPECT_LT(std::abs(mean), 0.6);
  EXPECT_GT(sd, 0.6);
  EXPECT_LT(sd, 1.5);
}

TEST(VarianceOfVariance, Rejections) {
  auto small = sample_difference_signal(matched(), StateSpec{TwinBeam{}, 1}, 5'000, 1);
  EXPECT_THROW(validate_variance_of_variance(small), std::invalid_argument);

  StateSpec silent{Coherent{}, 1};
  silent.overrides[1] = ModeNoise{0.0, 0.0, 0.0};
  auto zero = sample_difference_signal(matched(), silent, 10'000, 1);
  EXPECT_EQ(zero.empirical_m, 0.0);
  EXPECT_THROW(validate_variance_of_variance(zero), std::invalid_argument);
}

TEST(SamplesCsv, Format) {
  auto run = summarize(1, {0.5, -1.25});
  std::ostringstream out;
  write_samples_csv(out, run);
  EXPECT_EQ(out.str(), "shot_index,value\n0,0.5\n1,-1.25\n");
  EXPECT_DOUBLE_EQ(run.empirical_m, (0.25 + 1.5625) / 2.0);
}
