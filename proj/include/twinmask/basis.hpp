#pragma once

#include <complex>
#include <compare>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace twinmask {

/// Square sampling grid centred on the optical axis. Sample i sits at the
/// pixel centre -half_extent + (i + 1/2) * spacing along each axis.
struct TransverseGrid {
  double half_extent = 0.0;
  int samples_per_axis = 0;

  double spacing() const { return 2.0 * half_extent / samples_per_axis; }
  double coord(int i) const { return -half_extent + (i + 0.5) * spacing(); }
  double cell_area() const { return spacing() * spacing(); }

  bool operator==(const TransverseGrid&) const = default;
};

inline constexpr int kMinSamplesPerAxis = 16;

TransverseGrid make_grid(double half_extent, int samples_per_axis);

/// Grid used when none is configured: 4x the larger of waist and aperture
/// half-width, 512 samples per axis.
TransverseGrid default_grid(double waist, double aperture_half_width);

/// Hermite-Gauss TEM_mn label: m is the x order, n the y order.
struct ModeIndex {
  int m = 0;
  int n = 0;

  auto operator<=>(const ModeIndex&) const = default;
};

/// Complex amplitude sampled on a TransverseGrid. amplitude(ix, iy).
struct FieldProfile {
  TransverseGrid grid;
  Eigen::ArrayXXcd amplitude;
  // Set when the profile is not energetically contained in the grid.
  bool containment_warning = false;

  FieldProfile() = default;
  explicit FieldProfile(const TransverseGrid& g);
  FieldProfile(const TransverseGrid& g, Eigen::ArrayXXcd values);

  /// Discrete squared norm, sum |f|^2 * spacing^2.
  double norm2() const;
};

/// Normalized HG_mn at the waist plane, real and flat-phased.
FieldProfile hermite_gauss(ModeIndex index, double waist, const TransverseGrid& grid);

/// Midpoint-rule approximation of the integral of conj(f) * g.
std::complex<double> inner_product(const FieldProfile& f, const FieldProfile& g);

/// Copy of `f` rescaled to unit discrete norm. Throws on a zero profile.
FieldProfile normalized(const FieldProfile& f);

/// Even-even modes with m, n in {0,2,4,6,8}, sorted by m+n then m.
std::vector<ModeIndex> even_mode_sequence(int count);

/// Gram matrix G(i,j) = <modes[i], modes[j]>.
Eigen::MatrixXcd gram_matrix(std::span<const FieldProfile> modes);

/// Writes `x,y,re,im` rows, one per grid sample.
void write_profile_csv(std::ostream& out, const FieldProfile& f);

}  // namespace twinmask
