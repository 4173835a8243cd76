#include "twinmask/config.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

namespace twinmask {

namespace {

namespace pt = boost::property_tree;

std::string format_value(double v) { return fmt::format("{:.17g}", v); }
std::string format_value(int v) { return std::to_string(v); }
std::string format_value(std::int64_t v) { return std::to_string(v); }
std::string format_value(std::uint64_t v) { return std::to_string(v); }
std::string format_value(bool v) { return v ? "true" : "false"; }
std::string format_value(const std::string& v) { return v; }

template <class T>
T parse_value(const std::string& key, const std::string& text) {
  std::istringstream in(text);
  T v{};
  if constexpr (std::is_same_v<T, bool>) {
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    throw ConfigError(fmt::format("{}: expected true/false, got '{}'", key, text));
  } else if constexpr (std::is_same_v<T, std::string>) {
    return text;
  } else {
    in >> v;
    if (in.fail() || !(in >> std::ws).eof()) {
      throw ConfigError(fmt::format("{}: cannot parse '{}'", key, text));
    }
    return v;
  }
}

// Binds every config key to its field so parsing, validation of unknown keys
// and serialization share one list.
struct Field {
  std::string section;
  std::string key;
  std::function<void(RunConfig&, const std::string&)> read;
  std::function<std::string(const RunConfig&)> write;
};

template <class Group, class T>
Field field(const char* section, const char* key, Group RunConfig::*group, T Group::*member) {
  const std::string name = fmt::format("{}.{}", section, key);
  return Field{section, key,
               [=](RunConfig& c, const std::string& text) { (c.*group).*member = parse_value<T>(name, text); },
               [=](const RunConfig& c) { return format_value((c.*group).*member); }};
}

const std::vector<Field>& fields() {
  using C = RunConfig;
  static const std::vector<Field> all = {
      field("basis", "waist", &C::basis, &C::Basis::waist),
      field("basis", "half_extent", &C::basis, &C::Basis::half_extent),
      field("basis", "samples", &C::basis, &C::Basis::samples),
      field("basis", "modes", &C::basis, &C::Basis::modes),
      field("mask", "type", &C::mask, &C::Mask::type),
      field("mask", "center_x", &C::mask, &C::Mask::center_x),
      field("mask", "center_y", &C::mask, &C::Mask::center_y),
      field("mask", "half_width", &C::mask, &C::Mask::half_width),
      field("mask", "file", &C::mask, &C::Mask::file),
      field("state", "type", &C::state, &C::State::type),
      field("state", "var", &C::state, &C::State::var),
      field("state", "m0", &C::state, &C::State::m0),
      field("state", "v_min", &C::state, &C::State::v_min),
      field("state", "v_max", &C::state, &C::State::v_max),
      field("state", "axis", &C::state, &C::State::axis),
      field("state", "excited_modes", &C::state, &C::State::excited_modes),
      field("state", "components", &C::state, &C::State::components),
      field("scan", "d_min", &C::scan, &C::Scan::d_min),
      field("scan", "d_max", &C::scan, &C::Scan::d_max),
      field("scan", "steps", &C::scan, &C::Scan::steps),
      field("scan", "lo_b", &C::scan, &C::Scan::lo_b),
      field("scan", "slope_reference", &C::scan, &C::Scan::slope_reference),
      field("scan", "strategy", &C::scan, &C::Scan::strategy),
      field("mc", "enabled", &C::mc, &C::Mc::enabled),
      field("mc", "shots", &C::mc, &C::Mc::shots),
      field("mc", "seed", &C::mc, &C::Mc::seed),
      field("mc", "batches", &C::mc, &C::Mc::batches),
      field("mc", "dump_samples", &C::mc, &C::Mc::dump_samples),
      field("fig2", "var", &C::fig2, &C::Fig2::var),
      field("fig2", "m0", &C::fig2, &C::Fig2::m0),
      field("fig2", "t1_slope", &C::fig2, &C::Fig2::t1_slope),
      field("fig2", "points", &C::fig2, &C::Fig2::points),
      field("fig3", "n_max", &C::fig3, &C::Fig3::n_max),
      field("fig3", "var", &C::fig3, &C::Fig3::var),
      field("fig3", "m0", &C::fig3, &C::Fig3::m0),
      field("output", "directory", &C::output, &C::Output::directory),
      field("run", "command", &C::run, &C::Run::command),
      field("run", "threads", &C::run, &C::Run::threads),
      field("run", "tolerance_scale", &C::run, &C::Run::tolerance_scale),
  };
  return all;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(fmt::format("config syntax error: {}", e.message()));
  }

  RunConfig config;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw ConfigError(fmt::format("key '{}' must live inside a [section]", section));
    }
    for (const auto& [key, value] : body) {
      const auto& all = fields();
      auto it = std::find_if(all.begin(), all.end(),
                             [&](const Field& f) { return f.section == section && f.key == key; });
      if (it == all.end()) throw ConfigError(fmt::format("unknown config key {}.{}", section, key));
      it->read(config, value.data());
    }
  }
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config file '{}'", path));
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const RunConfig& config) {
  std::string out;
  std::string current;
  for (const auto& f : fields()) {
    if (f.section != current) {
      if (!current.empty()) out += "\n";
      out += fmt::format("[{}]\n", f.section);
      current = f.section;
    }
    out += fmt::format("{} = {}\n", f.key, f.write(config));
  }
  return out;
}

TransverseGrid build_grid(const RunConfig& c) {
  if (!(c.basis.waist > 0.0)) throw ConfigError("basis.waist must be positive");
  try {
    if (c.basis.half_extent > 0.0) return make_grid(c.basis.half_extent, c.basis.samples);
    return make_grid(4.0 * std::max(c.basis.waist, c.mask.half_width), c.basis.samples);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

MaskSpec build_mask(const RunConfig& c, const TransverseGrid& grid) {
  if (c.mask.type == "binary_square") {
    if (!(c.mask.half_width > 0.0)) throw ConfigError("mask.half_width must be positive");
    return BinarySquare{{c.mask.center_x, c.mask.center_y}, c.mask.half_width};
  }
  if (c.mask.type == "csv") {
    std::ifstream in(c.mask.file);
    if (!in) throw ConfigError(fmt::format("cannot open mask file '{}'", c.mask.file));
    try {
      return read_mask_csv(in, grid);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  throw ConfigError(fmt::format("unknown mask.type '{}'", c.mask.type));
}

StateSpec build_state(const RunConfig& c) {
  StateSpec s;
  s.excited_modes = c.state.excited_modes;
  const auto& t = c.state.type;
  if (t == "twin_beam") {
    s.kind = TwinBeam{c.state.var, c.state.m0};
  } else if (t == "thermal") {
    s.kind = Thermal{c.state.var};
  } else if (t == "coherent") {
    s.kind = Coherent{};
  } else if (t == "phase_sensitive") {
    s.kind = PhaseSensitive{c.state.v_min, c.state.v_max, c.state.axis};
  } else if (t == "classical_mixture") {
    ClassicalMixture mix;
    std::istringstream groups(c.state.components);
    std::string group;
    while (std::getline(groups, group, ';')) {
      if (group.find_first_not_of(" \t") == std::string::npos) continue;
      std::istringstream g(group);
      MixtureComponent comp;
      if (!(g >> comp.weight >> comp.mean_a >> comp.mean_b >> comp.var_a >> comp.var_b)) {
        throw ConfigError(fmt::format("state.components: cannot parse '{}'", group));
      }
      mix.components.push_back(comp);
    }
    s.kind = mix;
  } else {
    throw ConfigError(fmt::format("unknown state.type '{}'", t));
  }
  try {
    validate(s);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return s;
}

ScanOptions build_scan_options(const RunConfig& c) {
  ScanOptions o;
  o.lo_half_width = c.mask.half_width;
  o.lo_b_position = c.mask.center_x;
  if (c.scan.lo_b == "fixed") {
    o.lo_b = LoBMode::Fixed;
  } else if (c.scan.lo_b == "comoving") {
    o.lo_b = LoBMode::Comoving;
  } else if (c.scan.lo_b == "single_mode") {
    o.lo_b = LoBMode::SingleMode;
  } else {
    throw ConfigError(fmt::format("unknown scan.lo_b '{}'", c.scan.lo_b));
  }
  if (c.scan.slope_reference == "total") {
    o.slope_reference = SlopeReference::TotalTransmission;
  } else if (c.scan.slope_reference == "captured") {
    o.slope_reference = SlopeReference::CapturedTransmission;
  } else {
    throw ConfigError(fmt::format("unknown scan.slope_reference '{}'", c.scan.slope_reference));
  }
  o.threads = c.run.threads;
  return o;
}

std::vector<double> build_d_grid(const RunConfig& c) {
  if (c.scan.steps < 5) throw ConfigError("scan.steps must be at least 5");
  if (!(c.scan.d_max > c.scan.d_min)) throw ConfigError("scan.d_max must exceed scan.d_min");
  return linspace(c.scan.d_min, c.scan.d_max, c.scan.steps);
}

Strategy parse_strategy(const std::string& name) {
  if (name == "two_beam") return Strategy::TwoBeam;
  if (name == "single_beam") return Strategy::SingleBeam;
  if (name == "no_quantum") return Strategy::NoQuantum;
  throw ConfigError(fmt::format("unknown strategy '{}'", name));
}

}  // namespace twinmask
