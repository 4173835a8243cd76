#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include <gtest/gtest.h>

#include "oracle.hpp"
#include "twinmask/basis.hpp"

using namespace twinmask;

namespace {

FieldProfile random_profile(const TransverseGrid& g, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  FieldProfile f(g);
  for (int i = 0; i < g.samples_per_axis; ++i)
    for (int j = 0; j < g.samples_per_axis; ++j) f.amplitude(i, j) = {n(rng), n(rng)};
  return f;
}

}  // namespace

TEST(Grid, SpacingExamples) {
  EXPECT_DOUBLE_EQ(make_grid(4.0, 256).spacing(), 0.03125);
  EXPECT_DOUBLE_EQ(make_grid(1.0, 16).spacing(), 0.125);
}

TEST(Grid, RejectsBadInput) {
  EXPECT_THROW(make_grid(0.0, 256), std::invalid_argument);
  EXPECT_THROW(make_grid(-1.0, 256), std::invalid_argument);
  EXPECT_THROW(make_grid(1.0, 15), std::invalid_argument);
}

TEST(Grid, CenteredPixelCoordinates) {
  auto g = make_grid(1.0, 16);
  EXPECT_DOUBLE_EQ(g.coord(0), -1.0 + 0.0625);
  EXPECT_DOUBLE_EQ(g.coord(15), 1.0 - 0.0625);
  EXPECT_DOUBLE_EQ(g.coord(7) + g.coord(8), 0.0);
}

TEST(Grid, DefaultGrid) {
  auto g = default_grid(0.5, 1.0);
  EXPECT_DOUBLE_EQ(g.half_extent, 4.0);
  EXPECT_EQ(g.samples_per_axis, 512);
}

TEST(HermiteGauss, Hg00Normalized) {
  auto g = make_grid(4.0, 256);
  auto f = hermite_gauss({0, 0}, 1.0, g);
  EXPECT_NEAR(f.norm2(), 1.0, 1e-6);
  EXPECT_FALSE(f.containment_warning);
}

TEST(HermiteGauss, Hg00PeakMatchesClosedForm) {
  // Even sample count puts no pixel on the origin; use an odd-centred check by
  // evaluating the closed form at the nearest pixel instead.
  for (double w : {1.0, 0.7}) {
    auto g = make_grid(4.0 * w, 512);
    auto f = hermite_gauss({0, 0}, w, g);
    const double x = g.coord(256);
    const double expected = std::sqrt(2.0 / std::numbers::pi) / w * std::exp(-2.0 * x * x / (w * w));
    EXPECT_NEAR(f.amplitude(256, 256).real(), expected, 1e-9 / w);
    // 0.797884560802865 = sqrt(2/pi), frozen from a symbolic evaluation.
    EXPECT_NEAR(f.amplitude(256, 256).real() * std::exp(2.0 * x * x / (w * w)) * w, 0.797884560802865, 1e-9);
  }
}

TEST(HermiteGauss, MatchesIndependentHermitePolynomials) {
  const double w = 0.8;
  auto g = make_grid(4.0, 256);
  for (int m : {0, 2, 3, 6, 8}) {
    for (int n : {0, 1, 4, 8}) {
      auto f = hermite_gauss({m, n}, w, g);
      for (int i : {3, 64, 127, 128, 200}) {
        for (int j : {10, 100, 140}) {
          const double expected = oracle::hg1d(m, g.coord(i), w) * oracle::hg1d(n, g.coord(j), w);
          EXPECT_NEAR(f.amplitude(i, j).real(), expected, 1e-7) << m << n << " at " << i << "," << j;
          EXPECT_EQ(f.amplitude(i, j).imag(), 0.0);
        }
      }
    }
  }
}

TEST(HermiteGauss, Orthonormality) {
  auto g = make_grid(4.0, 256);
  auto h00 = hermite_gauss({0, 0}, 1.0, g);
  auto h02 = hermite_gauss({0, 2}, 1.0, g);
  auto h20 = hermite_gauss({2, 0}, 1.0, g);
  auto h22 = hermite_gauss({2, 2}, 1.0, g);
  EXPECT_NEAR(std::abs(inner_product(h00, h02)), 0.0, 1e-6);
  EXPECT_NEAR(std::abs(inner_product(h00, h20)), 0.0, 1e-6);
  EXPECT_NEAR(inner_product(h22, h22).real(), 1.0, 1e-6);
}

TEST(HermiteGauss, RejectsNonPositiveWaist) {
  auto g = make_grid(4.0, 64);
  EXPECT_THROW(hermite_gauss({0, 0}, 0.0, g), std::invalid_argument);
  EXPECT_THROW(hermite_gauss({0, 0}, -1.0, g), std::invalid_argument);
}

TEST(HermiteGauss, ContainmentWarning) {
  auto g = make_grid(4.0, 256);
  // 3 * 1 * sqrt(9) = 9 > 4
  EXPECT_TRUE(hermite_gauss({8, 8}, 1.0, g).containment_warning);
  EXPECT_FALSE(hermite_gauss({8, 8}, 0.4, g).containment_warning);
}

TEST(InnerProduct, GridMismatchThrows) {
  auto a = hermite_gauss({0, 0}, 1.0, make_grid(4.0, 64));
  auto b = hermite_gauss({0, 0}, 1.0, make_grid(4.0, 128));
  EXPECT_THROW(inner_product(a, b), std::invalid_argument);
}

TEST(InnerProduct, ConjugateSymmetryAndLinearityProperty) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n;
  auto g = make_grid(1.0, 32);
  for (int trial = 0; trial < 50; ++trial) {
    auto f = random_profile(g, rng);
    auto u = random_profile(g, rng);
    auto v = random_profile(g, rng);
    const std::complex<double> a{n(rng), n(rng)}, b{n(rng), n(rng)};

    const auto fu = inner_product(f, u);
    const auto uf = inner_product(u, f);
    EXPECT_NEAR(std::abs(fu - std::conj(uf)), 0.0, 1e-12 * (1.0 + std::abs(fu)));

    FieldProfile combo(g, a * u.amplitude + b * v.amplitude);
    const auto lhs = inner_product(f, combo);
    const auto rhs = a * fu + b * inner_product(f, v);
    EXPECT_NEAR(std::abs(lhs - rhs), 0.0, 1e-10 * (1.0 + std::abs(rhs)));
  }
}

TEST(Normalized, UnitNormAndZeroRejected) {
  auto g = make_grid(1.0, 16);
  FieldProfile f(g);
  EXPECT_THROW(normalized(f), std::invalid_argument);
  f.amplitude.setConstant({3.0, -1.0});
  EXPECT_NEAR(normalized(f).norm2(), 1.0, 1e-12);
}

TEST(EvenModes, Examples) {
  auto one = even_mode_sequence(1);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0], (ModeIndex{0, 0}));

  auto three = even_mode_sequence(3);
  ASSERT_EQ(three.size(), 3u);
  EXPECT_EQ(three[1], (ModeIndex{0, 2}));
  EXPECT_EQ(three[2], (ModeIndex{2, 0}));

  auto all = even_mode_sequence(25);
  ASSERT_EQ(all.size(), 25u);
  EXPECT_EQ(all.back(), (ModeIndex{8, 8}));
  for (std::size_t i = 0; i < all.size(); ++i) {
    EXPECT_EQ(all[i].m % 2, 0);
    EXPECT_EQ(all[i].n % 2, 0);
    EXPECT_LE(all[i].m, 8);
    EXPECT_LE(all[i].n, 8);
    for (std::size_t j = 0; j < i; ++j) EXPECT_NE(all[i], all[j]);
  }
}

TEST(EvenModes, OrderedByTotalThenM) {
  auto all = even_mode_sequence(25);
  for (std::size_t i = 1; i < all.size(); ++i) {
    const int prev = all[i - 1].m + all[i - 1].n, cur = all[i].m + all[i].n;
    EXPECT_TRUE(prev < cur || (prev == cur && all[i - 1].m < all[i].m));
  }
}

TEST(EvenModes, PrefixProperty) {
  for (int k = 1; k <= 24; ++k) {
    auto a = even_mode_sequence(k);
    auto b = even_mode_sequence(k + 1);
    ASSERT_EQ(b.size(), a.size() + 1);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], b[i]);
  }
}

TEST(EvenModes, CountOutOfRange) {
  EXPECT_THROW(even_mode_sequence(0), std::invalid_argument);
  EXPECT_THROW(even_mode_sequence(26), std::invalid_argument);
}

TEST(Gram, TwentyFiveModesOnDefaultGrid) {
  for (double w : {1.0, 0.21}) {
    auto g = default_grid(w, 1.0);
    std::vector<FieldProfile> modes;
    for (auto idx : even_mode_sequence(25)) modes.push_back(hermite_gauss(idx, w, g));
    auto G = gram_matrix(modes);
    const double err = (G - Eigen::MatrixXcd::Identity(25, 25)).cwiseAbs().maxCoeff();
    EXPECT_LT(err, 1e-4) << "waist " << w;
  }
}

TEST(ProfileCsv, HeaderAndRows) {
  auto g = make_grid(1.0, 16);
  auto f = hermite_gauss({0, 0}, 0.3, g);
  std::ostringstream out;
  write_profile_csv(out, f);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "x,y,re,im");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 16 * 16);
}
