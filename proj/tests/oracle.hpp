#pragma once

// Reference values computed without the library: 1-D Gauss-Kronrod quadrature
// of Boost's Hermite polynomials. Used to cross-check the grid quadrature.

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/factorials.hpp>
#include <boost/math/special_functions/hermite.hpp>

namespace oracle {

// Normalized 1-D Hermite-Gauss function of order m and waist w.
inline double hg1d(unsigned m, double x, double w) {
  const double norm = std::pow(2.0 / std::numbers::pi, 0.25) /
                      std::sqrt(std::ldexp(1.0, static_cast<int>(m)) * boost::math::factorial<double>(m) * w);
  return norm * boost::math::hermite(m, std::sqrt(2.0) * x / w) * std::exp(-x * x / (w * w));
}

// Overlap of hg1d(m) with the normalized top-hat of half-width a on [c - a, c + a].
inline double tophat_overlap(unsigned m, double w, double a, double c = 0.0) {
  auto f = [&](double x) { return hg1d(m, x, w); };
  const double integral = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, c - a, c + a, 15, 1e-14);
  return integral / std::sqrt(2.0 * a);
}

}  // namespace oracle
