#include "smoothsgd/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <string>

#include "json.hpp"
#include "smoothsgd/certifier.hpp"
#include "smoothsgd/smoothing.hpp"

namespace smoothsgd {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

// ---- clustering -------------------------------------------------------------------------------

std::vector<Cluster> single_linkage(const std::vector<Point>& points, double tol) {
  require(tol > 0.0, "single_linkage: tol must be > 0");
  const std::size_t n = points.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t i) {
    while (parent[i] != i) {
      parent[i] = parent[parent[i]];
      i = parent[i];
    }
    return i;
  };
  const double tol2 = tol * tol;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (dist2(points[i], points[j]) <= tol2) {
        const std::size_t a = find(i), b = find(j);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
    }
  }
  std::vector<Cluster> clusters;
  std::vector<std::size_t> slot(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t root = find(i);
    if (slot[root] == n) {
      slot[root] = clusters.size();
      clusters.push_back(Cluster{Point(points[i].size(), 0.0), {}});
    }
    Cluster& c = clusters[slot[root]];
    c.members.push_back(i);
    for (std::size_t k = 0; k < points[i].size(); ++k) c.center[k] += points[i][k];
  }
  for (auto& c : clusters) {
    for (double& v : c.center) v /= static_cast<double>(c.members.size());
  }
  return clusters;
}

std::size_t cluster_count(const std::vector<Point>& points, double tol) {
  return single_linkage(points, tol).size();
}

// ---- ensembles --------------------------------------------------------------------------------

Point draw_initial(const Box& init, RngStream& rng) {
  Point x(init.dimension());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = rng.uniform(init.lo[i], init.hi[i]);
  return x;
}

EnsembleResult run_ensemble(const Objective& objective, const StepSchedule& schedule,
                            const Box& init, std::uint64_t trials, std::uint64_t seed,
                            const EnsembleOptions& options) {
  require(trials >= 1, "run_ensemble: trials must be >= 1");
  require_dimension(objective.dimension(), init.dimension(), "run_ensemble init box");
  const auto& target = objective.target();

  EnsembleResult result;
  EnsembleReport& rep = result.report;
  rep.cluster_tol = options.cluster_tol;
  std::size_t successes = 0;
  for (std::uint64_t k = 0; k < trials; ++k) {
    RngStream rng(seed, k);
    const Point x0 = draw_initial(init, rng);
    Trajectory traj = sgd_run(objective, schedule, x0, rng);
    rep.initial_x.push_back(x0);
    rep.final_x.emplace_back(traj.final_x().begin(), traj.final_x().end());
    rep.final_y.emplace_back(traj.final_y().begin(), traj.final_y().end());
    const double d2 = target ? dist2(rep.final_y.back(), *target) : kNaN;
    rep.final_dist2.push_back(d2);
    rep.diverged.push_back(traj.diverged);
    if (options.success_radius2 && !traj.diverged && d2 <= *options.success_radius2) ++successes;
    if (options.keep_trajectories) result.trajectories.push_back(std::move(traj));
  }
  if (options.success_radius2) {
    rep.success_radius2 = *options.success_radius2;
    rep.success_fraction = static_cast<double>(successes) / static_cast<double>(trials);
  } else {
    rep.success_radius2 = kNaN;
    rep.success_fraction = kNaN;
  }
  rep.clusters = cluster_count(rep.final_x, options.cluster_tol);

  for (const auto& x : rep.final_x) {
    if (x.size() == 1) {
      rep.positions.push_back(x[0]);
    } else {
      rep.positions.push_back(target ? std::sqrt(dist2(x, *target)) : norm(x));
    }
  }
  rep.histogram = make_histogram(rep.positions, options.histogram_bins);
  return result;
}

TheoremConstants config_constants(const ExperimentConfig& config) {
  const Objective obj = config.objective.build();
  const StageSpec& first = config.stages.front();
  return constants(config.theory.c, first.eta, obj.smoothness(), first.kernel.radius,
                   config.theory.y0_dist2, config.theory.stay_steps);
}

EnsembleResult run_ensemble(const ExperimentConfig& config, bool keep_trajectories) {
  const Objective obj = config.objective.build();
  const TheoremConstants k = config_constants(config);
  EnsembleOptions options;
  options.cluster_tol = config.cluster_tol;
  options.histogram_bins = config.histogram_bins;
  options.success_radius2 = k.stay_radius2;
  options.keep_trajectories = keep_trajectories;
  return run_ensemble(obj, build_schedule(config), config.init_box, config.trials, config.seed,
                      options);
}

// ---- persistence ------------------------------------------------------------------------------

std::vector<std::string> trajectory_header(std::size_t dimension) {
  std::vector<std::string> h{"t", "stage"};
  for (std::size_t i = 0; i < dimension; ++i) h.push_back("x_" + std::to_string(i));
  for (const char* name : {"f", "grad_norm", "noise_norm", "dist2", "out_of_box"}) {
    h.emplace_back(name);
  }
  return h;
}

void write_trajectory_csv(const Trajectory& trajectory, const std::filesystem::path& path) {
  const std::size_t d = trajectory.dimension;
  CsvWriter csv(path, trajectory_header(d));
  std::vector<double> row(d + 7);
  for (std::size_t t = 0; t < trajectory.size(); ++t) {
    row[0] = static_cast<double>(t);
    row[1] = static_cast<double>(trajectory.stage[t]);
    const PointView x = trajectory.x_at(t);
    std::copy(x.begin(), x.end(), row.begin() + 2);
    row[d + 2] = trajectory.value[t];
    row[d + 3] = trajectory.grad_norm[t];
    row[d + 4] = trajectory.noise_norm[t];
    row[d + 5] = trajectory.dist2[t];
    row[d + 6] = trajectory.out_of_box[t];
    csv.row(row);
  }
  if (trajectory.diverged) csv.comment("diverged");
  csv.close();
}

Trajectory read_trajectory_csv(const std::filesystem::path& path) {
  const CsvTable table = read_csv(path);
  require(table.header.size() >= 8, "read_trajectory_csv: too few columns");
  const std::size_t d = table.header.size() - 7;
  require(table.header == trajectory_header(d), "read_trajectory_csv: unexpected header");
  Trajectory traj;
  traj.dimension = d;
  for (const auto& row : table.rows) {
    traj.stage.push_back(static_cast<std::uint32_t>(row[1]));
    traj.x.insert(traj.x.end(), row.begin() + 2, row.begin() + 2 + static_cast<long>(d));
    traj.value.push_back(row[d + 2]);
    traj.grad_norm.push_back(row[d + 3]);
    traj.noise_norm.push_back(row[d + 4]);
    traj.dist2.push_back(row[d + 5]);
    traj.out_of_box.push_back(static_cast<std::uint8_t>(row[d + 6]));
  }
  traj.diverged = std::find(table.comments.begin(), table.comments.end(), "diverged") !=
                  table.comments.end();
  return traj;
}

void write_finals_csv(const EnsembleReport& report, const std::filesystem::path& path) {
  const std::size_t d = report.final_x.empty() ? 0 : report.final_x.front().size();
  std::vector<std::string> header{"trial"};
  for (std::size_t i = 0; i < d; ++i) header.push_back("x_" + std::to_string(i));
  for (std::size_t i = 0; i < d; ++i) header.push_back("y_" + std::to_string(i));
  header.emplace_back("dist2");
  header.emplace_back("diverged");
  CsvWriter csv(path, header);
  for (std::size_t k = 0; k < report.final_x.size(); ++k) {
    std::vector<double> row{static_cast<double>(k)};
    row.insert(row.end(), report.final_x[k].begin(), report.final_x[k].end());
    row.insert(row.end(), report.final_y[k].begin(), report.final_y[k].end());
    row.push_back(report.final_dist2[k]);
    row.push_back(report.diverged[k] ? 1.0 : 0.0);
    csv.row(row);
  }
  csv.close();
}

namespace {

nlohmann::json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

nlohmann::json report_json(const EnsembleReport& rep) {
  std::vector<double> distances;
  std::size_t diverged = 0;
  for (std::size_t k = 0; k < rep.final_dist2.size(); ++k) {
    if (rep.diverged[k]) ++diverged;
    if (std::isfinite(rep.final_dist2[k])) distances.push_back(std::sqrt(rep.final_dist2[k]));
  }
  return nlohmann::json{
      {"trials", rep.final_x.size()},
      {"diverged", diverged},
      {"success_radius2", number_or_null(rep.success_radius2)},
      {"success_fraction", number_or_null(rep.success_fraction)},
      {"clusters", rep.clusters},
      {"cluster_tol", rep.cluster_tol},
      {"median_final_distance", number_or_null(distances.empty() ? kNaN : median(distances))},
      {"histogram",
       {{"lo", rep.histogram.lo}, {"hi", rep.histogram.hi}, {"counts", rep.histogram.counts}}},
  };
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << text;
}

}  // namespace

void write_ensemble(const EnsembleResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (std::size_t k = 0; k < result.trajectories.size(); ++k) {
    write_trajectory_csv(result.trajectories[k], dir / ("trial_" + std::to_string(k) + ".csv"));
  }
  write_finals_csv(result.report, dir / "finals.csv");
  write_text(dir / "summary.json", report_json(result.report).dump(2) + "\n");

  emit_svg_histogram(result.report.positions, result.report.histogram.counts.size(), dir / "histogram.svg",
                     "final iterates");
}

// ---- smoothed curves --------------------------------------------------------------------------

std::vector<double> linspace(double lo, double hi, std::size_t points) {
  require(points >= 1, "linspace: points must be >= 1");
  if (points == 1) return {0.5 * (lo + hi)};
  std::vector<double> out(points);
  const double step = (hi - lo) / static_cast<double>(points - 1);
  for (std::size_t k = 0; k < points; ++k) out[k] = lo + step * static_cast<double>(k);
  out.back() = hi;
  return out;
}

std::vector<SmoothRow> smooth_curve(const Objective& objective, const NoiseKernel& kernel,
                                    double eta, const std::vector<double>& ys, std::uint64_t n,
                                    const RngStream& rng, double confidence) {
  require(objective.dimension() == 1, "smooth_curve: one-dimensional objectives only");
  std::vector<SmoothRow> rows;
  rows.reserve(ys.size());
  for (std::size_t j = 0; j < ys.size(); ++j) {
    const Point y{ys[j]};
    RngStream point_rng = rng.substream(j);
    const SmoothedValue mc = smoothed_value_mc(objective, kernel, eta, y, n, point_rng, confidence);
    const auto closed = smoothed_value_exact(objective, kernel, eta, y);
    rows.push_back(SmoothRow{ys[j], objective.value(y), mc.mean, closed ? *closed : kNaN,
                             mc.confidence_halfwidth});
  }
  return rows;
}

void write_smooth_csv(const std::vector<SmoothRow>& rows, const std::filesystem::path& path) {
  CsvWriter csv(path, {"y", "f", "g_mc", "g_closed", "ci_halfwidth"});
  for (const auto& r : rows) csv.row({r.y, r.f, r.g_mc, r.g_closed, r.ci_halfwidth});
  csv.close();
}

// ---- figure 3 ---------------------------------------------------------------------------------

double quantile(std::vector<double> values, double q) {
  require(!values.empty(), "quantile: empty input");
  require(q >= 0.0 && q <= 1.0, "quantile: q must be in [0, 1]");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

namespace {

double max_corner_dist2(const Box& box, PointView target) {
  double s = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    const double a = std::abs(box.lo[i] - target[i]);
    const double b = std::abs(box.hi[i] - target[i]);
    s += std::max(a, b) * std::max(a, b);
  }
  return s;
}

}  // namespace

Figure3Result run_figure3(const ExperimentConfig& config,
                          const std::optional<std::filesystem::path>& out) {
  const Objective obj = config.objective.build();
  const std::size_t d = obj.dimension();
  const auto& f3 = config.figure3;
  const Point target = obj.target().value_or(Point(d, 0.0));
  Figure3Result result;

  if (out) {
    std::filesystem::create_directories(*out / "row1");
    std::filesystem::create_directories(*out / "row2");
    std::filesystem::create_directories(*out / "row3");
  }

  // Row 1: smoothed landscapes.
  if (d == 1) {
    const std::vector<double> ys = linspace(f3.curve.lo, f3.curve.hi, f3.curve.points);
    for (std::size_t k = 0; k < f3.levels.size(); ++k) {
      const NoiseKernel kernel = level_kernel(f3.kind, f3.levels[k], f3.eta, d);
      const auto rows = smooth_curve(obj, kernel, f3.eta, ys, f3.curve_samples,
                                     RngStream(config.seed, 0).substream(1000 + k),
                                     config.confidence);
      if (out) write_smooth_csv(rows, *out / "row1" / ("level_" + std::to_string(k) + ".csv"));
    }
  }

  const double y0_dist2 = max_corner_dist2(config.init_box, target);
  EnsembleOptions options;
  options.cluster_tol = config.cluster_tol;
  options.histogram_bins = config.histogram_bins;
  options.keep_trajectories = false;

  // Row 2: one ensemble per noise level, all from the same seed.
  for (std::size_t k = 0; k < f3.levels.size(); ++k) {
    const NoiseKernel kernel = level_kernel(f3.kind, f3.levels[k], f3.eta, d);
    const TheoremConstants tc = constants(config.theory.c, f3.eta, obj.smoothness(),
                                          kernel.radius(), y0_dist2, f3.steps);
    options.success_radius2 = tc.stay_radius2;
    auto ens = run_ensemble(obj, StepSchedule::constant(f3.eta, f3.steps, kernel),
                            config.init_box, config.trials, config.seed, options);
    if (out) {
      const std::string stem = "level_" + std::to_string(k);
      write_finals_csv(ens.report, *out / "row2" / (stem + "_finals.csv"));
      emit_svg_histogram(ens.report.positions, config.histogram_bins,
                         *out / "row2" / (stem + ".svg"),
                         "noise level " + format_number(f3.levels[k]));
    }
    result.row2.push_back(std::move(ens.report));
  }

  // Row 3: shrinking stages, each restarted inside the previous stage's spread.
  Box init = config.init_box;
  for (std::size_t k = 0; k < f3.stages.size(); ++k) {
    const Figure3Stage& stage = f3.stages[k];
    const NoiseKernel kernel = level_kernel(f3.kind, stage.level, stage.eta, d);
    const TheoremConstants tc = constants(stage.c, stage.eta, obj.smoothness(), kernel.radius(),
                                          max_corner_dist2(init, target), stage.steps);
    options.success_radius2 = tc.stay_radius2;
    const std::uint64_t stage_seed = splitmix64(config.seed ^ (0x5EED0000ull + k));
    auto ens = run_ensemble(obj, StepSchedule::constant(stage.eta, stage.steps, kernel), init,
                            config.trials, stage_seed, options);

    std::vector<double> distances;
    for (const auto& x : ens.report.final_x) distances.push_back(std::sqrt(dist2(x, target)));
    result.row3_median_distance.push_back(median(distances));
    result.row3_constants.push_back(tc);
    result.row3_init.push_back(init);

    if (out) {
      const std::string stem = "stage_" + std::to_string(k);
      write_finals_csv(ens.report, *out / "row3" / (stem + "_finals.csv"));
      emit_svg_histogram(ens.report.positions, config.histogram_bins,
                         *out / "row3" / (stem + ".svg"),
                         "stage " + std::to_string(k + 1) + ", noise level " +
                             format_number(stage.level));
    }

    Box next{Point(d), Point(d)};
    for (std::size_t i = 0; i < d; ++i) {
      std::vector<double> coord;
      for (const auto& x : ens.report.final_x) coord.push_back(x[i]);
      next.lo[i] = quantile(coord, 0.1);
      next.hi[i] = quantile(coord, 0.9);
    }
    init = next;
    result.row3.push_back(std::move(ens.report));
  }

  if (out) {
    nlohmann::json summary;
    summary["row2"] = nlohmann::json::array();
    for (std::size_t k = 0; k < result.row2.size(); ++k) {
      auto j = report_json(result.row2[k]);
      j["level"] = f3.levels[k];
      summary["row2"].push_back(j);
    }
    summary["row3"] = nlohmann::json::array();
    for (std::size_t k = 0; k < result.row3.size(); ++k) {
      auto j = report_json(result.row3[k]);
      j["level"] = f3.stages[k].level;
      j["eta"] = f3.stages[k].eta;
      j["median_distance"] = result.row3_median_distance[k];
      j["stay_radius2"] = result.row3_constants[k].stay_radius2;
      j["init_lo"] = result.row3_init[k].lo;
      j["init_hi"] = result.row3_init[k].hi;
      summary["row3"].push_back(j);
    }
    write_text(*out / "summary.json", summary.dump(2) + "\n");
  }
  return result;
}

}  // namespace smoothsgd
