// smoothsgd: command-line harness for SGD-on-smoothed-landscape experiments.
//
//   smoothsgd run       --config c.json [--x0 1.5] [--out dir]
//   smoothsgd ensemble  --config c.json [--trials 100] [--out dir]
//   smoothsgd smooth    --config c.json [--out dir]
//   smoothsgd certify   --config c.json [--calibrate] [--out dir]
//   smoothsgd bounds    [--config c.json] [--c 1 --eta 0.1 --L 1 --r 1 ...]
//   smoothsgd figure3   --config c.json [--out dir]
//
// Exit codes: 0 success, 1 configuration error, 2 numerical divergence.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "smoothsgd/certifier.hpp"
#include "smoothsgd/config.hpp"
#include "smoothsgd/csv.hpp"
#include "smoothsgd/experiment.hpp"
#include "smoothsgd/theory.hpp"

namespace fs = std::filesystem;
using namespace smoothsgd;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitDivergence = 2;

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::uint64_t> trials;
};

void add_common(CLI::App* cmd, CommonOptions& opts, bool config_required = true) {
  auto* cfg = cmd->add_option("--config", opts.config_path, "Experiment config (JSON)");
  if (config_required) cfg->required();
  cmd->add_option("--seed", opts.seed, "Override the config seed");
  cmd->add_option("--out", opts.out, "Output directory");
  cmd->add_option("--trials", opts.trials, "Override the number of trials");
}

ExperimentConfig load(const CommonOptions& opts) {
  ExperimentConfig config = opts.config_path.empty() ? ExperimentConfig{}
                                                     : load_config(opts.config_path);
  if (opts.config_path.empty()) validate(config);
  if (opts.seed) config.seed = *opts.seed;
  if (opts.out) config.output = *opts.out;
  if (opts.trials) {
    if (*opts.trials == 0) throw ConfigError("--trials must be >= 1");
    config.trials = *opts.trials;
  }
  return config;
}

fs::path output_dir(const ExperimentConfig& config) {
  fs::path dir(config.output);
  fs::create_directories(dir);
  return dir;
}

int cmd_run(const CommonOptions& opts, const std::vector<double>& x0_flag) {
  const ExperimentConfig config = load(opts);
  const Objective obj = config.objective.build();
  RngStream rng(config.seed, 0);
  Point x0 = draw_initial(config.init_box, rng);
  if (!x0_flag.empty()) {
    if (x0_flag.size() != obj.dimension()) throw ConfigError("--x0 has the wrong dimension");
    x0 = x0_flag;
  }
  const Trajectory traj = sgd_run(obj, build_schedule(config), x0, rng);
  const fs::path dir = output_dir(config);
  write_trajectory_csv(traj, dir / "trial_0.csv");
  std::cout << "records=" << traj.size() << " diverged=" << (traj.diverged ? 1 : 0)
            << " final_f=" << format_number(traj.value.back())
            << " shadow_residual=" << format_number(shadow_check(traj, obj)) << "\n";
  if (traj.diverged) {
    std::cerr << "smoothsgd: trajectory diverged\n";
    return kExitDivergence;
  }
  return 0;
}

int cmd_ensemble(const CommonOptions& opts) {
  const ExperimentConfig config = load(opts);
  const EnsembleResult result = run_ensemble(config, /*keep_trajectories=*/true);
  const fs::path dir = output_dir(config);
  write_ensemble(result, dir);
  std::size_t diverged = 0;
  for (bool d : result.report.diverged) diverged += d;
  std::cout << "trials=" << result.report.final_x.size() << " diverged=" << diverged
            << " clusters=" << result.report.clusters
            << " success_fraction=" << format_number(result.report.success_fraction) << "\n";
  return 0;
}

int cmd_smooth(const CommonOptions& opts) {
  const ExperimentConfig config = load(opts);
  const Objective obj = config.objective.build();
  if (obj.dimension() != 1) throw ConfigError("smooth: objective must be one-dimensional");
  const auto& s = config.smooth;
  const auto rows = smooth_curve(obj, s.kernel.build(1), s.eta,
                                 linspace(s.grid.lo, s.grid.hi, s.grid.points), config.samples,
                                 RngStream(config.seed, 0), config.confidence);
  const fs::path dir = output_dir(config);
  write_smooth_csv(rows, dir / "smooth.csv");
  std::size_t covered = 0, closed = 0;
  for (const auto& r : rows) {
    if (std::isnan(r.g_closed)) continue;
    ++closed;
    covered += std::abs(r.g_mc - r.g_closed) <= r.ci_halfwidth;
  }
  std::cout << "points=" << rows.size() << " closed_form=" << closed << " covered=" << covered
            << "\n";
  return 0;
}

void write_certificates(const RegionScan& scan, std::size_t d, const fs::path& path,
                        const std::string& summary) {
  std::vector<std::string> header;
  for (std::size_t i = 0; i < d; ++i) header.push_back("x_" + std::to_string(i));
  for (const char* h : {"inner", "dist2", "c_hat", "ci", "pass", "degenerate"}) {
    header.emplace_back(h);
  }
  CsvWriter csv(path, header);
  for (const auto& c : scan.certificates) {
    std::vector<double> row(c.x.begin(), c.x.end());
    row.insert(row.end(), {c.inner, c.dist2, c.c_hat, c.ci_halfwidth, c.pass ? 1.0 : 0.0,
                           c.degenerate ? 1.0 : 0.0});
    csv.row(row);
  }
  csv.comment(summary);
  csv.close();
}

std::string scan_summary(const RegionScan& scan) {
  std::ostringstream s;
  s << " certified_c=" << format_number(scan.certified_c)
    << " pass_fraction=" << format_number(scan.pass_fraction)
    << " degenerate=" << scan.degenerate << " points=" << scan.certificates.size();
  return s.str();
}

int cmd_certify(const CommonOptions& opts, bool calibrate) {
  const ExperimentConfig config = load(opts);
  const Objective obj = config.objective.build();
  const std::size_t d = obj.dimension();
  const Point target = obj.target().value_or(Point(d, 0.0));
  const auto grid = cell_centered_grid(d, config.grid.lo, config.grid.hi, config.grid.points);
  const fs::path dir = output_dir(config);

  if (!calibrate) {
    const StageSpec& stage = config.stages.front();
    const RegionScan scan = region_scan(obj, stage.kernel.build(d), stage.eta, target, grid,
                                        config.c_min, config.samples, RngStream(config.seed, 0),
                                        config.confidence);
    const std::string summary = scan_summary(scan);
    write_certificates(scan, d, dir / "certify.csv", summary);
    std::cout << "#" << summary << "\n";
    return 0;
  }

  const auto& cal = config.calibration;
  CalibrationOptions copt;
  copt.kind = cal.kind;
  copt.c_min = cal.c_min;
  copt.eta = cal.eta > 0.0 ? cal.eta : calibrated_eta(cal.c_min, obj.smoothness());
  for (std::size_t k = 0; k < cal.width_count; ++k) {
    copt.widths.push_back(cal.width_lo + cal.width_step * static_cast<double>(k));
  }
  copt.screen_samples = cal.screen_samples;
  copt.samples = cal.samples;
  copt.confidence = config.confidence;
  const NoiseCalibration result =
      calibrate_noise(obj, target, grid, copt, RngStream(config.seed, 0));

  CsvWriter csv(dir / "calibrate.csv",
                {"width", "radius", "samples", "accepted", "certified_c"});
  for (const auto& a : result.attempts) {
    csv.row({a.width, a.radius, static_cast<double>(a.samples), a.accepted ? 1.0 : 0.0,
             a.certified_c});
  }
  csv.close();
  if (!result.radius) {
    std::cout << "# calibration failed: no candidate width certified c >= "
              << format_number(cal.c_min) << "\n";
    return 0;
  }
  const std::string summary = " eta=" + format_number(copt.eta) +
                              " radius=" + format_number(*result.radius) + scan_summary(*result.scan);
  write_certificates(*result.scan, d, dir / "certify.csv", summary);
  std::cout << "#" << summary << "\n";
  return 0;
}

struct BoundsOverrides {
  std::optional<double> c, eta, L, r, y0_dist2;
  std::optional<std::uint64_t> t2;
};

int cmd_bounds(const CommonOptions& opts, const BoundsOverrides& o) {
  const ExperimentConfig config = load(opts);
  const Objective obj = config.objective.build();
  const StageSpec& stage = config.stages.front();
  const TheoremConstants k =
      constants(o.c.value_or(config.theory.c), o.eta.value_or(stage.eta),
                o.L.value_or(obj.smoothness()), o.r.value_or(stage.kernel.radius),
                o.y0_dist2.value_or(config.theory.y0_dist2), o.t2.value_or(config.theory.stay_steps));

  auto num = [](double v) { return format_number(v); };
  const std::string t1 = k.t1_min ? std::to_string(*k.t1_min) : "unbounded";
  const std::vector<std::pair<std::string, std::string>> rows{
      {"c", num(k.c)},
      {"eta", num(k.eta)},
      {"L", num(k.smoothness)},
      {"r", num(k.radius)},
      {"y0_dist2", num(k.y0_dist2)},
      {"T2", std::to_string(k.stay_steps)},
      {"lambda", num(k.lambda)},
      {"b", num(k.b)},
      {"T1_min", t1},
      {"stay_radius2", num(k.stay_radius2)},
      {"zeta", num(k.zeta)},
      {"mu", num(k.mu)},
      {"delta2", num(k.delta2)},
      {"eta_bound", num(k.eta_bound)},
      {"eta_valid", k.eta_valid ? "true" : "false"},
  };
  std::size_t width = 0;
  for (const auto& [key, _] : rows) width = std::max(width, key.size());
  for (const auto& [key, value] : rows) {
    std::cout << std::left << std::setw(static_cast<int>(width)) << key << " : " << value << "\n";
  }

  auto jnum = [](double v) {
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
  };
  nlohmann::json j{{"c", k.c},
                   {"eta", k.eta},
                   {"L", k.smoothness},
                   {"r", k.radius},
                   {"y0_dist2", k.y0_dist2},
                   {"T2", k.stay_steps},
                   {"lambda", jnum(k.lambda)},
                   {"b", jnum(k.b)},
                   {"T1_min", k.t1_min ? nlohmann::json(*k.t1_min) : nlohmann::json(nullptr)},
                   {"stay_radius2", jnum(k.stay_radius2)},
                   {"zeta", jnum(k.zeta)},
                   {"mu", jnum(k.mu)},
                   {"delta2", jnum(k.delta2)},
                   {"eta_bound", jnum(k.eta_bound)},
                   {"eta_valid", k.eta_valid}};
  const std::string text = j.dump(2);
  std::cout << text << "\n";
  if (opts.out) {
    fs::create_directories(*opts.out);
    std::ofstream(fs::path(*opts.out) / "bounds.json", std::ios::binary) << text << "\n";
  }
  return 0;
}

int cmd_figure3(const CommonOptions& opts) {
  const ExperimentConfig config = load(opts);
  const fs::path dir = output_dir(config);
  const Figure3Result result = run_figure3(config, dir);
  std::cout << "row2:";
  for (const auto& r : result.row2) std::cout << " clusters=" << r.clusters;
  std::cout << "\nrow3 median |x - x*|:";
  for (double m : result.row3_median_distance) std::cout << " " << format_number(m);
  std::cout << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SGD on noise-smoothed landscapes: simulation, certification and bounds"};
  app.require_subcommand(1);

  CommonOptions run_opts, ens_opts, smooth_opts, cert_opts, bounds_opts, fig_opts;
  std::vector<double> x0;
  bool calibrate = false;
  BoundsOverrides overrides;

  auto* run = app.add_subcommand("run", "Single SGD trajectory");
  add_common(run, run_opts);
  run->add_option("--x0", x0, "Initial point (defaults to a draw from init_box)");

  auto* ensemble = app.add_subcommand("ensemble", "Independent SGD trials");
  add_common(ensemble, ens_opts);

  auto* smooth = app.add_subcommand("smooth", "Smoothed landscape: Monte Carlo vs closed form");
  add_common(smooth, smooth_opts);

  auto* certify = app.add_subcommand("certify", "One-point-convexity certificates on a grid");
  add_common(certify, cert_opts);
  certify->add_flag("--calibrate", calibrate, "Search the smallest certifying noise radius");

  auto* bounds = app.add_subcommand("bounds", "Theorem constants");
  add_common(bounds, bounds_opts, /*config_required=*/false);
  bounds->add_option("--c", overrides.c);
  bounds->add_option("--eta", overrides.eta);
  bounds->add_option("--L", overrides.L);
  bounds->add_option("--r", overrides.r);
  bounds->add_option("--y0-dist2", overrides.y0_dist2);
  bounds->add_option("--t2", overrides.t2);

  auto* figure3 = app.add_subcommand("figure3", "Spiky-landscape noise-level experiment");
  add_common(figure3, fig_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return cmd_run(run_opts, x0);
    if (*ensemble) return cmd_ensemble(ens_opts);
    if (*smooth) return cmd_smooth(smooth_opts);
    if (*certify) return cmd_certify(cert_opts, calibrate);
    if (*bounds) return cmd_bounds(bounds_opts, overrides);
    if (*figure3) return cmd_figure3(fig_opts);
  } catch (const ConfigError& e) {
    std::cerr << "smoothsgd: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InvalidArgument& e) {
    std::cerr << "smoothsgd: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cerr << "smoothsgd: " << e.what() << "\n";
    return kExitDivergence;
  }
  return 0;
}
