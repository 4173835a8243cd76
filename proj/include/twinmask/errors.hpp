#pragma once

#include <stdexcept>
#include <string>

namespace twinmask {

// Invalid inputs are reported with std::invalid_argument. The types below
// mark numerical situations where the inputs are valid but the requested
// quantity does not exist; the CLI maps all of them to exit code 3.
class NumericalDegeneracy : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Beam-b local oscillator has no overlap with any listed basis mode.
class DegenerateLoError : public NumericalDegeneracy {
 public:
  using NumericalDegeneracy::NumericalDegeneracy;
};

class BoundaryExtremumError : public NumericalDegeneracy {
 public:
  using NumericalDegeneracy::NumericalDegeneracy;
};

// T''(0) vanishes, so dM/dT cannot be formed from curvatures.
class DegenerateParameterizationError : public NumericalDegeneracy {
 public:
  using NumericalDegeneracy::NumericalDegeneracy;
};

class NoSignalError : public NumericalDegeneracy {
 public:
  using NumericalDegeneracy::NumericalDegeneracy;
};

}  // namespace twinmask
