#include "twinmask/mask.hpp"

#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "twinmask/errors.hpp"

namespace twinmask {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_grid(const TransverseGrid& mask_grid, const TransverseGrid& grid) {
  if (!(mask_grid == grid)) {
    throw std::invalid_argument("sampled mask is defined on a different grid than the profile");
  }
}

void require_shape(const Eigen::ArrayXXd& a, const TransverseGrid& g, const char* what) {
  if (a.rows() != g.samples_per_axis || a.cols() != g.samples_per_axis) {
    throw std::invalid_argument(fmt::format("mask {} array does not match its grid", what));
  }
}

void require_unit_interval(const Eigen::ArrayXXd& t) {
  if (t.size() > 0 && (!(t.minCoeff() >= 0.0) || !(t.maxCoeff() <= 1.0))) {
    throw std::invalid_argument("mask transmission must lie in [0, 1]");
  }
}

}  // namespace

void validate(const MaskSpec& mask) {
  std::visit(overloaded{
                 [](const BinarySquare& m) {
                   if (!(m.half_width > 0.0)) {
                     throw std::invalid_argument("square mask half_width must be positive");
                   }
                 },
                 [](const SoftMask& m) {
                   require_shape(m.transmission, m.grid, "transmission");
                   require_unit_interval(m.transmission);
                 },
                 [](const PhaseMask& m) {
                   require_shape(m.phase, m.grid, "phase");
                   if (m.transmission.size() != 0) {
                     require_shape(m.transmission, m.grid, "transmission");
                     require_unit_interval(m.transmission);
                   }
                   if (!m.phase.allFinite()) throw std::invalid_argument("mask phase must be finite");
                 },
             },
             mask);
}

Eigen::ArrayXXd transmission_map(const MaskSpec& mask, const TransverseGrid& grid) {
  validate(mask);
  const int n = grid.samples_per_axis;
  return std::visit(overloaded{
                        [&](const BinarySquare& m) {
                          Eigen::ArrayXXd t(n, n);
                          for (int iy = 0; iy < n; ++iy) {
                            const bool in_y = std::abs(grid.coord(iy) - m.center[1]) < m.half_width;
                            for (int ix = 0; ix < n; ++ix) {
                              const bool in_x = std::abs(grid.coord(ix) - m.center[0]) < m.half_width;
                              t(ix, iy) = (in_x && in_y) ? 1.0 : 0.0;
                            }
                          }
                          return t;
                        },
                        [&](const SoftMask& m) -> Eigen::ArrayXXd {
                          require_grid(m.grid, grid);
                          return m.transmission;
                        },
                        [&](const PhaseMask& m) -> Eigen::ArrayXXd {
                          require_grid(m.grid, grid);
                          if (m.transmission.size() == 0) return Eigen::ArrayXXd::Ones(n, n);
                          return m.transmission;
                        },
                    },
                    mask);
}

Eigen::ArrayXXd phase_map(const MaskSpec& mask, const TransverseGrid& grid) {
  if (const auto* p = std::get_if<PhaseMask>(&mask)) {
    require_grid(p->grid, grid);
    return p->phase;
  }
  if (const auto* s = std::get_if<SoftMask>(&mask)) require_grid(s->grid, grid);
  return Eigen::ArrayXXd::Zero(grid.samples_per_axis, grid.samples_per_axis);
}

OverlapSet make_overlaps(std::span<const double> t_signed, std::span<const double> alpha_signed,
                         double t_total) {
  if (t_signed.size() != alpha_signed.size()) {
    throw std::invalid_argument("t and alpha coefficient lists differ in length");
  }
  double a2 = 0.0;
  for (double a : alpha_signed) a2 += a * a;
  if (!(a2 > 0.0)) throw DegenerateLoError("beam-b LO has no weight on the listed modes");
  const double a_scale = 1.0 / std::sqrt(a2);

  OverlapSet o;
  for (std::size_t i = 0; i < t_signed.size(); ++i) {
    o.modes.push_back({static_cast<int>(i), 0});
    o.t.push_back(std::abs(t_signed[i]));
    o.phi.push_back(t_signed[i] < 0.0 ? std::numbers::pi : 0.0);
    o.alpha.push_back(std::abs(alpha_signed[i]) * a_scale);
    o.theta.push_back(alpha_signed[i] < 0.0 ? std::numbers::pi : 0.0);
    o.t_captured += t_signed[i] * t_signed[i];
  }
  o.t_total = t_total;
  return o;
}

void validate(const OverlapSet& o) {
  const std::size_t n = o.t.size();
  if (o.phi.size() != n || o.alpha.size() != n || o.theta.size() != n || o.modes.size() != n) {
    throw std::invalid_argument("overlap set has inconsistent lengths");
  }
  double a2 = 0.0;
  double t2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(o.t[i] >= 0.0) || !(o.alpha[i] >= 0.0)) {
      throw std::invalid_argument("overlap magnitudes must be non-negative");
    }
    a2 += o.alpha[i] * o.alpha[i];
    t2 += o.t[i] * o.t[i];
  }
  if (std::abs(a2 - 1.0) > 1e-6) {
    throw std::invalid_argument(fmt::format("beam-b overlaps must satisfy sum alpha^2 = 1, got {}", a2));
  }
  if (!(o.t_total >= -1e-9 && o.t_total <= 1.0 + 1e-9)) {
    throw std::invalid_argument(fmt::format("T_total outside [0, 1]: {}", o.t_total));
  }
  if (t2 > o.t_total + 1e-6) {
    throw std::invalid_argument(fmt::format("captured transmission {} exceeds total {}", t2, o.t_total));
  }
}

FieldProfile masked_lo(const FieldProfile& lo, const MaskSpec& mask) {
  const Eigen::ArrayXXd t = transmission_map(mask, lo.grid);
  const Eigen::ArrayXXd ph = phase_map(mask, lo.grid);
  FieldProfile out(lo.grid);
  const Eigen::ArrayXXcd factor = (std::complex<double>(0.0, -1.0) * ph.cast<std::complex<double>>()).exp() *
                                  t.sqrt().cast<std::complex<double>>();
  out.amplitude = factor * lo.amplitude;
  return out;
}

double lo_transmission(const FieldProfile& lo, const MaskSpec& mask) {
  const Eigen::ArrayXXd power = lo.amplitude.abs2();
  const double total = power.sum();
  if (!(total > 0.0)) throw std::invalid_argument("LO has zero norm");
  return (transmission_map(mask, lo.grid) * power).sum() / total;
}

OverlapSet expansion_coeffs(const FieldProfile& masked, const FieldProfile& lo_b,
                            std::span<const FieldProfile> basis, std::span<const ModeIndex> indices) {
  if (basis.size() != indices.size()) {
    throw std::invalid_argument("basis profiles and mode labels differ in length");
  }
  if (!(masked.grid == lo_b.grid)) throw std::invalid_argument("masked LO and beam-b LO grids differ");

  OverlapSet o;
  o.modes.assign(indices.begin(), indices.end());
  std::vector<std::complex<double>> b(basis.size());
  double b2 = 0.0;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const auto a = inner_product(basis[i], masked);
    b[i] = inner_product(basis[i], lo_b);
    b2 += std::norm(b[i]);
    o.t.push_back(std::abs(a));
    o.phi.push_back(std::abs(a) > 0.0 ? std::arg(a) : 0.0);
    o.t_captured += std::norm(a);
  }
  if (!(b2 > 1e-12 * lo_b.norm2()) || !(b2 > 0.0)) {
    throw DegenerateLoError("beam-b LO is orthogonal to every basis mode");
  }
  const double scale = 1.0 / std::sqrt(b2);
  for (const auto& c : b) {
    o.alpha.push_back(std::abs(c) * scale);
    o.theta.push_back(std::abs(c) > 0.0 ? std::arg(c) : 0.0);
  }
  o.t_total = masked.norm2();
  return o;
}

FieldProfile square_lo(double displacement, double half_width, const TransverseGrid& grid) {
  if (!(half_width > 0.0)) throw std::invalid_argument("square LO half_width must be positive");
  if (std::abs(displacement) + half_width > grid.half_extent || half_width > grid.half_extent) {
    throw std::invalid_argument(
        fmt::format("square LO at displacement {} with half-width {} leaves the grid", displacement, half_width));
  }
  const Eigen::ArrayXXd t = transmission_map(BinarySquare{{displacement, 0.0}, half_width}, grid);
  FieldProfile lo(grid);
  lo.amplitude = t.cast<std::complex<double>>();
  return normalized(lo);
}

MaskSpec read_mask_csv(std::istream& in, const TransverseGrid& grid) {
  const int n = grid.samples_per_axis;
  const double s = grid.spacing();
  Eigen::ArrayXXd t = Eigen::ArrayXXd::Constant(n, n, -1.0);
  Eigen::ArrayXXd ph = Eigen::ArrayXXd::Zero(n, n);
  bool any_phase = false;

  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("mask CSV is empty");
  long row = 1;
  long count = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    std::stringstream ss(line);
    std::string cell;
    double v[4];
    int k = 0;
    try {
      while (k < 4 && std::getline(ss, cell, ',')) v[k++] = std::stod(cell);
    } catch (const std::exception&) {
      throw std::invalid_argument(fmt::format("mask CSV row {}: unparsable number", row));
    }
    if (k != 4) throw std::invalid_argument(fmt::format("mask CSV row {}: expected 4 columns", row));
    const int ix = static_cast<int>(std::lround((v[0] + grid.half_extent) / s - 0.5));
    const int iy = static_cast<int>(std::lround((v[1] + grid.half_extent) / s - 0.5));
    if (ix < 0 || ix >= n || iy < 0 || iy >= n || std::abs(grid.coord(ix) - v[0]) > 0.25 * s ||
        std::abs(grid.coord(iy) - v[1]) > 0.25 * s) {
      throw std::invalid_argument(fmt::format("mask CSV row {}: ({}, {}) is not a grid sample", row, v[0], v[1]));
    }
    if (t(ix, iy) >= 0.0) throw std::invalid_argument(fmt::format("mask CSV row {}: duplicate sample", row));
    t(ix, iy) = v[2];
    ph(ix, iy) = v[3];
    any_phase = any_phase || v[3] != 0.0;
    ++count;
  }
  if (count != static_cast<long>(n) * n) {
    throw std::invalid_argument(fmt::format("mask CSV has {} samples, grid needs {}", count, long(n) * n));
  }
  MaskSpec out = any_phase ? MaskSpec{PhaseMask{grid, ph, t}} : MaskSpec{SoftMask{grid, t}};
  validate(out);
  return out;
}

void write_mask_csv(std::ostream& out, const MaskSpec& mask, const TransverseGrid& grid) {
  const Eigen::ArrayXXd t = transmission_map(mask, grid);
  const Eigen::ArrayXXd ph = phase_map(mask, grid);
  out << "x,y,T,phi\n";
  for (int iy = 0; iy < grid.samples_per_axis; ++iy) {
    for (int ix = 0; ix < grid.samples_per_axis; ++ix) {
      fmt::print(out, "{:.17g},{:.17g},{:.17g},{:.17g}\n", grid.coord(ix), grid.coord(iy), t(ix, iy), ph(ix, iy));
    }
  }
}

}  // namespace twinmask
