#include "twinmask/basis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace twinmask {

TransverseGrid make_grid(double half_extent, int samples_per_axis) {
  if (!(half_extent > 0.0) || !std::isfinite(half_extent)) {
    throw std::invalid_argument(fmt::format("grid half_extent must be positive, got {}", half_extent));
  }
  if (samples_per_axis < kMinSamplesPerAxis) {
    throw std::invalid_argument(
        fmt::format("grid needs at least {} samples per axis, got {}", kMinSamplesPerAxis, samples_per_axis));
  }
  return TransverseGrid{half_extent, samples_per_axis};
}

TransverseGrid default_grid(double waist, double aperture_half_width) {
  return make_grid(4.0 * std::max(waist, aperture_half_width), 512);
}

FieldProfile::FieldProfile(const TransverseGrid& g)
    : grid(g), amplitude(Eigen::ArrayXXcd::Zero(g.samples_per_axis, g.samples_per_axis)) {}

FieldProfile::FieldProfile(const TransverseGrid& g, Eigen::ArrayXXcd values)
    : grid(g), amplitude(std::move(values)) {
  if (amplitude.rows() != g.samples_per_axis || amplitude.cols() != g.samples_per_axis) {
    throw std::invalid_argument("profile amplitude shape does not match its grid");
  }
}

double FieldProfile::norm2() const { return amplitude.abs2().sum() * grid.cell_area(); }

namespace {

// Normalized Hermite functions h_k(xi) = H_k(xi) exp(-xi^2/2) / sqrt(2^k k! sqrt(pi)),
// built with the three-term recurrence so high orders do not overflow.
Eigen::ArrayXd hermite_function(int order, const Eigen::ArrayXd& xi) {
  Eigen::ArrayXd prev = std::pow(std::numbers::pi, -0.25) * (-0.5 * xi.square()).exp();
  if (order == 0) return prev;
  Eigen::ArrayXd cur = std::sqrt(2.0) * xi * prev;
  for (int k = 1; k < order; ++k) {
    Eigen::ArrayXd next = std::sqrt(2.0 / (k + 1)) * xi * cur - std::sqrt(double(k) / (k + 1)) * prev;
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

// 1-D HG amplitude u_k(x) with intensity profile exp(-2x^2/w^2) for k = 0.
Eigen::ArrayXd hg_axis(int order, double waist, const TransverseGrid& grid) {
  Eigen::ArrayXd x(grid.samples_per_axis);
  for (int i = 0; i < grid.samples_per_axis; ++i) x[i] = grid.coord(i);
  const Eigen::ArrayXd xi = std::sqrt(2.0) * x / waist;
  return std::sqrt(std::sqrt(2.0) / waist) * hermite_function(order, xi);
}

}  // namespace

FieldProfile hermite_gauss(ModeIndex index, double waist, const TransverseGrid& grid) {
  if (!(waist > 0.0)) {
    throw std::invalid_argument(fmt::format("waist must be positive, got {}", waist));
  }
  if (index.m < 0 || index.n < 0) {
    throw std::invalid_argument("mode orders must be non-negative");
  }
  const Eigen::ArrayXd ux = hg_axis(index.m, waist, grid);
  const Eigen::ArrayXd uy = hg_axis(index.n, waist, grid);

  FieldProfile f(grid);
  f.amplitude = (ux.matrix() * uy.matrix().transpose()).array().cast<std::complex<double>>();
  const double n2 = f.norm2();
  if (!(n2 > 0.0)) {
    throw std::invalid_argument("mode vanishes on the grid");
  }
  f.amplitude /= std::sqrt(n2);

  const int top = std::max(index.m, index.n);
  f.containment_warning = grid.half_extent < 3.0 * waist * std::sqrt(top + 1.0);
  return f;
}

std::complex<double> inner_product(const FieldProfile& f, const FieldProfile& g) {
  if (!(f.grid == g.grid)) {
    throw std::invalid_argument("inner_product: profiles live on different grids");
  }
  return (f.amplitude.conjugate() * g.amplitude).sum() * f.grid.cell_area();
}

FieldProfile normalized(const FieldProfile& f) {
  const double n2 = f.norm2();
  if (!(n2 > 0.0)) {
    throw std::invalid_argument("cannot normalize a zero profile");
  }
  FieldProfile out = f;
  out.amplitude /= std::sqrt(n2);
  return out;
}

std::vector<ModeIndex> even_mode_sequence(int count) {
  if (count < 1 || count > 25) {
    throw std::invalid_argument(fmt::format("even mode count must be in [1, 25], got {}", count));
  }
  std::vector<ModeIndex> all;
  for (int m = 0; m <= 8; m += 2) {
    for (int n = 0; n <= 8; n += 2) all.push_back({m, n});
  }
  std::sort(all.begin(), all.end(), [](ModeIndex a, ModeIndex b) {
    if (a.m + a.n != b.m + b.n) return a.m + a.n < b.m + b.n;
    return a.m < b.m;
  });
  all.resize(count);
  return all;
}

Eigen::MatrixXcd gram_matrix(std::span<const FieldProfile> modes) {
  const auto n = static_cast<Eigen::Index>(modes.size());
  Eigen::MatrixXcd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      g(i, j) = inner_product(modes[i], modes[j]);
      g(j, i) = std::conj(g(i, j));
    }
  }
  return g;
}

void write_profile_csv(std::ostream& out, const FieldProfile& f) {
  out << "x,y,re,im\n";
  const auto& grid = f.grid;
  for (int iy = 0; iy < grid.samples_per_axis; ++iy) {
    for (int ix = 0; ix < grid.samples_per_axis; ++ix) {
      const auto v = f.amplitude(ix, iy);
      fmt::print(out, "{:.12g},{:.12g},{:.12g},{:.12g}\n", grid.coord(ix), grid.coord(iy), v.real(), v.imag());
    }
  }
}

}  // namespace twinmask
