#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "twinmask/basis.hpp"

namespace twinmask {

/// Square aperture, transmission exactly 1 inside and 0 outside.
struct BinarySquare {
  std::array<double, 2> center{0.0, 0.0};
  double half_width = 1.0;
};

/// Gray-level intensity mask sampled on a grid, T(ix, iy) in [0, 1].
struct SoftMask {
  TransverseGrid grid;
  Eigen::ArrayXXd transmission;
};

/// Phase mask; an empty transmission array means T = 1 everywhere.
struct PhaseMask {
  TransverseGrid grid;
  Eigen::ArrayXXd phase;
  Eigen::ArrayXXd transmission;
};

using MaskSpec = std::variant<BinarySquare, SoftMask, PhaseMask>;

/// Checks 0 <= T <= 1 and array shapes; throws std::invalid_argument.
void validate(const MaskSpec& mask);

/// Intensity transmission sampled at the pixel centres of `grid`.
Eigen::ArrayXXd transmission_map(const MaskSpec& mask, const TransverseGrid& grid);
Eigen::ArrayXXd phase_map(const MaskSpec& mask, const TransverseGrid& grid);

/// Expansion of the masked beam-a LO and of the beam-b LO on a truncated basis.
/// t/phi and alpha/theta are magnitude and phase of the complex coefficients.
struct OverlapSet {
  std::vector<ModeIndex> modes;
  std::vector<double> t;
  std::vector<double> phi;
  std::vector<double> alpha;
  std::vector<double> theta;
  double t_total = 0.0;
  double t_captured = 0.0;

  std::size_t size() const { return t.size(); }
};

/// Builds an OverlapSet from real signed coefficients (negative values map to
/// phase pi). alpha is renormalized to unit sum of squares.
OverlapSet make_overlaps(std::span<const double> t_signed, std::span<const double> alpha_signed,
                         double t_total);

/// Throws std::invalid_argument unless the OverlapSet invariants hold.
void validate(const OverlapSet& overlaps);

/// exp(-i phi) sqrt(T) lo, pointwise; no renormalization.
FieldProfile masked_lo(const FieldProfile& lo, const MaskSpec& mask);

/// Power fraction of `lo` passed by the mask.
double lo_transmission(const FieldProfile& lo, const MaskSpec& mask);

/// Projects the masked beam-a LO and the beam-b LO onto `basis`.
/// T_total is the squared norm of `masked`, which equals the LO transmission
/// for a normalized LO.
OverlapSet expansion_coeffs(const FieldProfile& masked, const FieldProfile& lo_b,
                            std::span<const FieldProfile> basis, std::span<const ModeIndex> indices);

/// Normalized constant-amplitude square of the given half-width centred at
/// (displacement, 0).
FieldProfile square_lo(double displacement, double half_width, const TransverseGrid& grid);

/// Raster CSV with header `x,y,T,phi`, one row per sample of `grid`. Returns a
/// SoftMask when every phase is zero, otherwise a PhaseMask.
MaskSpec read_mask_csv(std::istream& in, const TransverseGrid& grid);
void write_mask_csv(std::ostream& out, const MaskSpec& mask, const TransverseGrid& grid);

}  // namespace twinmask
