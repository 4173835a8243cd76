#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "twinmask/config.hpp"

namespace twinmask::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 1,
  kSelftestFailure = 2,
  kNumericalDegeneracy = 3,
};

struct SelftestCheck {
  std::string name;
  double value = 0.0;      // error measure, compared as value < tolerance
  double tolerance = 0.0;  // already multiplied by run.tolerance_scale
  bool pass = false;
};

std::vector<SelftestCheck> selftest_checks(const RunConfig& config);

/// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace twinmask::cli
