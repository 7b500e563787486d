#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "smoothsgd/config.hpp"
#include "smoothsgd/csv.hpp"
#include "smoothsgd/objectives.hpp"
#include "smoothsgd/optimizer.hpp"
#include "smoothsgd/point.hpp"
#include "smoothsgd/rng.hpp"
#include "smoothsgd/svg.hpp"
#include "smoothsgd/theory.hpp"

namespace smoothsgd {

// ---- clustering -------------------------------------------------------------------------------

struct Cluster {
  Point center;  // mean of the members
  std::vector<std::size_t> members;
};

/// Single-linkage clusters: points closer than `tol` (Euclidean) are merged transitively.
/// Clusters are ordered by their smallest member index.
std::vector<Cluster> single_linkage(const std::vector<Point>& points, double tol);

std::size_t cluster_count(const std::vector<Point>& points, double tol);

// ---- ensembles --------------------------------------------------------------------------------

struct EnsembleOptions {
  double cluster_tol = 0.05;
  std::size_t histogram_bins = 40;
  /// Final shadow points within this squared distance of the target count as successes.
  std::optional<double> success_radius2;
  bool keep_trajectories = true;
};

struct EnsembleReport {
  std::vector<Point> initial_x;
  std::vector<Point> final_x;
  std::vector<Point> final_y;
  std::vector<double> final_dist2;  // of y; NaN without a target
  std::vector<bool> diverged;
  double success_fraction = 0.0;  // NaN when no success radius was given
  double success_radius2 = 0.0;
  std::size_t clusters = 0;
  double cluster_tol = 0.0;
  std::vector<double> positions;  // final x_0 in one dimension, |x - target| otherwise
  Histogram histogram;            // of positions
};

struct EnsembleResult {
  EnsembleReport report;
  std::vector<Trajectory> trajectories;  // trial order; empty unless kept
};

/// Runs `trials` independent SGD trials. Trial k uses RngStream(seed, k): first for its initial
/// point (uniform in `init`), then for its noise. Divergent trials are recorded, not fatal.
EnsembleResult run_ensemble(const Objective& objective, const StepSchedule& schedule,
                            const Box& init, std::uint64_t trials, std::uint64_t seed,
                            const EnsembleOptions& options);

/// Ensemble described by a config. The success radius is the stay radius 20 b / lambda computed
/// from the theory section and the first stage.
EnsembleResult run_ensemble(const ExperimentConfig& config, bool keep_trajectories = false);

TheoremConstants config_constants(const ExperimentConfig& config);

/// Uniform initial point for a trial; consumes `dimension` uniforms from `rng`.
Point draw_initial(const Box& init, RngStream& rng);

// ---- persistence ------------------------------------------------------------------------------

std::vector<std::string> trajectory_header(std::size_t dimension);

/// `t,stage,x_0..x_{d-1},f,grad_norm,noise_norm,dist2,out_of_box`, one row per record.
void write_trajectory_csv(const Trajectory& trajectory, const std::filesystem::path& path);

/// Reads back the columns a trajectory CSV holds; y and the noise vectors are not persisted.
Trajectory read_trajectory_csv(const std::filesystem::path& path);

/// `trial,x_0..,y_0..,dist2,diverged`.
void write_finals_csv(const EnsembleReport& report, const std::filesystem::path& path);

/// Writes trial_{k}.csv (when trajectories were kept), finals.csv, summary.json and
/// histogram.svg into `dir`.
void write_ensemble(const EnsembleResult& result, const std::filesystem::path& dir);

// ---- smoothed curves --------------------------------------------------------------------------

struct SmoothRow {
  double y = 0.0;
  double f = 0.0;
  double g_mc = 0.0;
  double g_closed = 0.0;  // NaN without a closed form
  double ci_halfwidth = 0.0;
};

/// One-dimensional objectives only. Point j draws from rng.substream(j).
std::vector<SmoothRow> smooth_curve(const Objective& objective, const NoiseKernel& kernel,
                                    double eta, const std::vector<double>& ys, std::uint64_t n,
                                    const RngStream& rng, double confidence);

/// Evenly spaced points including both ends; `points` >= 2, or the midpoint when 1.
std::vector<double> linspace(double lo, double hi, std::size_t points);

void write_smooth_csv(const std::vector<SmoothRow>& rows, const std::filesystem::path& path);

// ---- figure 3 pipeline ------------------------------------------------------------------------

struct Figure3Result {
  std::vector<EnsembleReport> row2;  // one per noise level
  std::vector<EnsembleReport> row3;  // one per shrink stage
  std::vector<double> row3_median_distance;
  std::vector<TheoremConstants> row3_constants;
  std::vector<Box> row3_init;
};

/// Runs the three rows and, when `out` is set, writes row1/, row2/, row3/ and summary.json.
/// Row 2 panel k is the ensemble of config.figure3 at noise level k with seed config.seed, so the
/// zero level is exactly the plain gradient-descent ensemble. Row 3 stage k > 0 starts from
/// uniform points in the coordinate-wise [q10, q90] interval of stage k - 1's finals.
Figure3Result run_figure3(const ExperimentConfig& config,
                          const std::optional<std::filesystem::path>& out);

double median(std::vector<double> values);
double quantile(std::vector<double> values, double q);

}  // namespace smoothsgd
