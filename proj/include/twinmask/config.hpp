#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "twinmask/basis.hpp"
#include "twinmask/mask.hpp"
#include "twinmask/protocol.hpp"
#include "twinmask/state.hpp"

namespace twinmask {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Everything a CLI run needs. Serialized as `[section]` / `key = value` text.
struct RunConfig {
  struct Basis {
    double waist = 0.21;
    double half_extent = 0.0;  // 0: 4 x max(waist, mask half-width)
    int samples = 512;
    int modes = 25;
    bool operator==(const Basis&) const = default;
  } basis;

  struct Mask {
    std::string type = "binary_square";  // binary_square | csv
    double center_x = 0.0;
    double center_y = 0.0;
    double half_width = 1.0;
    std::string file;
    bool operator==(const Mask&) const = default;
  } mask;

  struct State {
    std::string type = "twin_beam";  // twin_beam | thermal | coherent | phase_sensitive | classical_mixture
    double var = 5.0;
    double m0 = 0.1;
    double v_min = 1.0;
    double v_max = 1.0;
    double axis = 0.0;
    int excited_modes = 25;
    // "weight mean_a mean_b var_a var_b; ..." for classical_mixture
    std::string components;
    bool operator==(const State&) const = default;
  } state;

  struct Scan {
    double d_min = -0.125;
    double d_max = 0.125;
    int steps = 17;
    std::string lo_b = "fixed";         // fixed | comoving | single_mode
    std::string slope_reference = "total";  // total | captured
    std::string strategy = "two_beam";  // strategy used to locate the optimum
    bool operator==(const Scan&) const = default;
  } scan;

  struct Mc {
    bool enabled = false;
    std::int64_t shots = 100'000;
    std::uint64_t seed = 12345;
    int batches = 100;
    bool dump_samples = false;
    bool operator==(const Mc&) const = default;
  } mc;

  struct Fig2 {
    double var = 5.0;
    double m0 = 0.1;
    double t1_slope = 0.8;
    int points = 101;
    bool operator==(const Fig2&) const = default;
  } fig2;

  struct Fig3 {
    int n_max = 25;
    double var = 5.0;
    double m0 = 0.1;
    bool operator==(const Fig3&) const = default;
  } fig3;

  struct Output {
    std::string directory;  // empty: $TWINMASK_OUT_DIR, then "."
    bool operator==(const Output&) const = default;
  } output;

  struct Run {
    std::string command;
    int threads = 0;
    double tolerance_scale = 1.0;  // selftest tolerances are multiplied by this
    bool operator==(const Run&) const = default;
  } run;

  bool operator==(const RunConfig&) const = default;
};

/// Parses config text; unknown sections or keys are rejected.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& config);

TransverseGrid build_grid(const RunConfig& config);
MaskSpec build_mask(const RunConfig& config, const TransverseGrid& grid);
StateSpec build_state(const RunConfig& config);
ScanOptions build_scan_options(const RunConfig& config);
std::vector<double> build_d_grid(const RunConfig& config);
Strategy parse_strategy(const std::string& name);

}  // namespace twinmask
