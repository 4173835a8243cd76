#include "twinmask/commands.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "twinmask/errors.hpp"
#include "twinmask/montecarlo.hpp"
#include "twinmask/noise_model.hpp"
#include "twinmask/protocol.hpp"

namespace twinmask::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kFooter = R"(Output files (12 significant digits):
  scan.csv      d,T_total,T_captured,m_tb,m_sb
  fig2.csv      T,dt2_sb,dt2_tb
  fig3.csv      n,ratio
  mc.csv        shot_index,value   (when mc.dump_samples = true)
  manifest.ini  the effective configuration; rerun with --config manifest.ini
Exit codes: 0 ok, 1 config error, 2 selftest failure, 3 numerical degeneracy.
The output directory defaults to $TWINMASK_OUT_DIR, then the current directory.)";

struct Overrides {
  std::string config_path;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> shots;
  std::optional<int> threads;
};

RunConfig effective_config(const Overrides& o, const std::string& command) {
  RunConfig c = o.config_path.empty() ? RunConfig{} : load_config(o.config_path);
  if (o.out) c.output.directory = *o.out;
  if (o.seed) c.mc.seed = *o.seed;
  if (o.shots) c.mc.shots = *o.shots;
  if (o.threads) c.run.threads = *o.threads;
  if (c.output.directory.empty()) {
    const char* env = std::getenv("TWINMASK_OUT_DIR");
    c.output.directory = (env && *env) ? env : ".";
  }
  c.run.command = command;
  return c;
}

fs::path prepare_output(const RunConfig& c) {
  const fs::path dir(c.output.directory);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw ConfigError(fmt::format("cannot create output directory '{}'", c.output.directory));
  }
  std::ofstream manifest(dir / "manifest.ini");
  if (!manifest) throw ConfigError(fmt::format("output directory '{}' is not writable", c.output.directory));
  manifest << serialize_config(c);
  return dir;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream f(path);
  if (!f) throw ConfigError(fmt::format("cannot write '{}'", path.string()));
  return f;
}

struct Setup {
  TransverseGrid grid;
  ModeBasis basis;
  MaskSpec mask;
  StateSpec state;
  ScanOptions scan;
};

Setup build_setup(const RunConfig& c) {
  Setup s;
  s.grid = build_grid(c);
  if (c.basis.modes < 1 || c.basis.modes > 25) throw ConfigError("basis.modes must be in [1, 25]");
  s.basis = make_mode_basis(c.basis.waist, s.grid, c.basis.modes);
  s.mask = build_mask(c, s.grid);
  s.state = build_state(c);
  s.scan = build_scan_options(c);
  return s;
}

// Overlaps with both LOs at the mask centre.
OverlapSet centred_overlaps(const Setup& s, const RunConfig& c) {
  const double x0 = c.mask.center_x;
  const std::vector<double> d{x0 - s.grid.spacing(), x0, x0 + s.grid.spacing()};
  return *scan_displacement(s.mask, s.basis, s.state, d, s.scan).samples[1].overlaps;
}

int cmd_selftest(const RunConfig& c, std::ostream& out) {
  const auto checks = selftest_checks(c);
  bool ok = true;
  fmt::print(out, "{:<40} {:>14} {:>12}  result\n", "check", "value", "tolerance");
  for (const auto& k : checks) {
    fmt::print(out, "{:<40} {:>14.6g} {:>12.3g}  {}\n", k.name, k.value, k.tolerance, k.pass ? "PASS" : "FAIL");
    ok = ok && k.pass;
  }
  fmt::print(out, "selftest {}\n", ok ? "passed" : "FAILED");
  return ok ? kOk : kSelftestFailure;
}

int cmd_scan(const RunConfig& c, std::ostream& out) {
  const Setup s = build_setup(c);
  const auto d_grid = build_d_grid(c);
  const auto dir = prepare_output(c);
  const TransmissionCurve curve = scan_displacement(s.mask, s.basis, s.state, d_grid, s.scan);
  auto csv = open_output(dir / "scan.csv");
  write_scan_csv(csv, curve);
  const Strategy strategy = parse_strategy(c.scan.strategy);
  const Optimum opt = locate_optimum(curve, strategy);
  fmt::print(out, "scan: {} points, strategy {}, d_star={:.6g}, m_star={:.6g}\n", curve.samples.size(),
             to_string(strategy), opt.d_star, opt.m_star);
  return kOk;
}

int cmd_fig2(const RunConfig& c, std::ostream& out) {
  if (c.fig2.points < 2) throw ConfigError("fig2.points must be at least 2");
  if (!(c.fig2.var > 1.0) || !(c.fig2.m0 > 0.0)) throw ConfigError("fig2 needs var > 1 and m0 > 0");
  const auto dir = prepare_output(c);
  const auto t_grid = linspace(0.0, 1.0, c.fig2.points);
  const Fig2Table table = fig2_table(c.fig2.var, c.fig2.m0, t_grid, c.fig2.t1_slope);
  auto csv = open_output(dir / "fig2.csv");
  write_fig2_csv(csv, table);
  const auto& last = table.rows.back();
  if (table.crossover) {
    fmt::print(out, "fig2: crossover T={:.3f}; at T=1 dt2_sb={:.6g} dt2_tb={:.6g}\n", *table.crossover, last.dt2_sb,
               last.dt2_tb);
  } else {
    fmt::print(out, "fig2: no crossover in [0, 1]; at T=1 dt2_sb={:.6g} dt2_tb={:.6g}\n", last.dt2_sb, last.dt2_tb);
  }
  return kOk;
}

int cmd_fig3(const RunConfig& c, std::ostream& out) {
  if (c.mask.type != "binary_square") throw ConfigError("fig3 needs mask.type = binary_square");
  const Setup s = build_setup(c);
  const auto dir = prepare_output(c);
  Fig3Options opt;
  opt.grid = s.grid;
  opt.lo_b = s.scan.lo_b;
  opt.slope_reference = s.scan.slope_reference;
  opt.threads = c.run.threads;
  const auto& sq = std::get<BinarySquare>(s.mask);
  const auto points = fig3_curve(c.fig3.n_max, c.fig3.var, c.fig3.m0, c.basis.waist, sq, opt);
  auto csv = open_output(dir / "fig3.csv");
  write_fig3_csv(csv, points);
  fmt::print(out, "fig3: waist/half_width={:.4g}, ratio(N={})={:.4f}\n", c.basis.waist / sq.half_width,
             points.back().n_modes, points.back().ratio);
  return kOk;
}

int cmd_mc(const RunConfig& c, std::ostream& out) {
  const Setup s = build_setup(c);
  const auto dir = prepare_output(c);
  const OverlapSet o = centred_overlaps(s, c);
  const McRun run = sample_difference_signal(o, s.state, c.mc.shots, c.mc.seed, {}, c.run.threads);
  const double analytic = m_tb(o, s.state).m;
  const double z = (run.empirical_m - analytic) / run.stderr_m;
  const MomentReport moments = validate_variance_of_variance(run, c.mc.batches);
  if (c.mc.dump_samples) {
    auto csv = open_output(dir / "mc.csv");
    write_samples_csv(csv, run);
  }
  fmt::print(out, "mc: M_TB analytic={:.6g} MC={:.6g}+-{:.3g}\n", analytic, run.empirical_m, run.stderr_m);
  fmt::print(out, "analytic/MC z={:.3f}, |z|<3: {}\n", z, std::abs(z) < 3.0 ? "yes" : "no");
  fmt::print(out, "moments: <X^4>/(3<X^2>^2)={:.4f}, variance-of-variance z={:.3f}\n", moments.m4_ratio, moments.z);
  return kOk;
}

int cmd_estimate(const RunConfig& c, std::ostream& out) {
  const Setup s = build_setup(c);
  const auto d_grid = build_d_grid(c);
  const auto dir = prepare_output(c);
  McConfig mc{c.mc.enabled, c.mc.shots, c.mc.seed, c.run.threads};
  const EstimateReport r =
      estimate_shape(s.mask, s.basis, s.state, d_grid, s.scan, mc, parse_strategy(c.scan.strategy));
  auto csv = open_output(dir / "scan.csv");
  write_scan_csv(csv, r.curve);
  fmt::print(out, "estimate ({}): d_star={:.6g}\n", r.monte_carlo ? "monte carlo" : "analytic", r.optimum.d_star);
  fmt::print(out, "dT2: two_beam={:.6g} single_beam={:.6g} no_quantum={:.6g}; enhancement={:.4g}\n",
             r.tb.delta_t2, r.sb.delta_t2, r.nq.delta_t2, r.enhancement);
  return kOk;
}

}  // namespace

std::vector<SelftestCheck> selftest_checks(const RunConfig& c) {
  const Setup s = build_setup(c);
  const double scale = c.run.tolerance_scale;
  std::vector<SelftestCheck> checks;
  auto add = [&](std::string name, double value, double tol) {
    checks.push_back({std::move(name), value, tol * scale, value < tol * scale});
  };

  const Eigen::MatrixXcd gram = gram_matrix(s.basis.profiles);
  const auto n = gram.rows();
  add("orthonormality max|G - I|", (gram - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-4);

  const FieldProfile lo = square_lo(c.mask.center_x, c.mask.half_width, s.grid);
  const FieldProfile masked = masked_lo(lo, s.mask);
  add("LO transmission = |masked LO|^2", std::abs(lo_transmission(lo, s.mask) - masked.norm2()), 1e-8);
  const OverlapSet o = expansion_coeffs(masked, lo, s.basis.profiles, s.basis.indices);
  add("Parseval: T_captured - T_total", std::max(0.0, o.t_captured - o.t_total), 1e-6);

  const StateSpec coherent{Coherent{}, c.state.excited_modes, {}};
  add("coherent M_TB analytic |M - 1|", std::abs(m_tb(o, coherent).m - 1.0), 1e-12);
  add("coherent M_SB analytic |M - 1|", std::abs(m_sb(o, coherent).m - 1.0), 1e-12);
  const McRun coh = sample_difference_signal(o, coherent, 100'000, c.mc.seed, {}, c.run.threads);
  add("coherent M_TB Monte Carlo |z|", std::abs(coh.empirical_m - 1.0) / coh.stderr_m, 3.0);

  const OverlapSet matched = make_overlaps(std::vector<double>{1.0}, std::vector<double>{1.0}, 1.0);
  const McRun twin = sample_difference_signal(matched, StateSpec{TwinBeam{5.0, 0.1}, 1, {}}, 100'000, c.mc.seed,
                                              {}, c.run.threads);
  const MomentReport m = validate_variance_of_variance(twin, 100);
  add("Gaussian |<X^4>/(3<X^2>^2) - 1|", std::abs(m.m4_ratio - 1.0), 0.05);
  add("variance-of-variance |z|", std::abs(m.z), 3.0);
  return checks;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mask-shape estimation from twin-beam homodyne noise", "twinmask"};
  app.footer(kFooter);
  app.require_subcommand(1);
  Overrides o;
  app.add_option("--config", o.config_path, "Run configuration file ([section] key = value)");
  app.add_option("--out", o.out, "Output directory");
  app.add_option("--seed", o.seed, "Monte Carlo seed");
  app.add_option("--shots", o.shots, "Monte Carlo shots");
  app.add_option("--threads", o.threads, "Worker threads (default: available cores)");

  using Handler = int (*)(const RunConfig&, std::ostream&);
  const std::vector<std::tuple<const char*, const char*, Handler>> commands = {
      {"selftest", "Orthonormality, Parseval, moment and coherent-state checks", cmd_selftest},
      {"scan", "Displacement scan of the LO across the mask", cmd_scan},
      {"fig2", "Uniform-mode uncertainty versus transmission", cmd_fig2},
      {"fig3", "Enhancement versus number of excited HG modes", cmd_fig3},
      {"mc", "Monte Carlo check of the analytic noise at the matched point", cmd_mc},
      {"estimate", "Full pipeline: scan, optimum, sensitivities", cmd_estimate},
  };
  for (const auto& [name, help, fn] : commands) app.add_subcommand(name, help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  for (const auto& [name, help, fn] : commands) {
    if (!app.got_subcommand(name)) continue;
    try {
      return fn(effective_config(o, name), out);
    } catch (const ConfigError& e) {
      fmt::print(err, "config error: {}\n", e.what());
      return kConfigError;
    } catch (const NumericalDegeneracy& e) {
      fmt::print(err, "numerical degeneracy: {}\n", e.what());
      return kNumericalDegeneracy;
    } catch (const std::invalid_argument& e) {
      fmt::print(err, "invalid input: {}\n", e.what());
      return kConfigError;
    }
  }
  return kConfigError;
}

}  // namespace twinmask::cli
