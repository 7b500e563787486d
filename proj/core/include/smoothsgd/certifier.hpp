#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "smoothsgd/noise.hpp"
#include "smoothsgd/objectives.hpp"
#include "smoothsgd/optimizer.hpp"
#include "smoothsgd/point.hpp"
#include "smoothsgd/rng.hpp"
#include "smoothsgd/smoothing.hpp"

namespace smoothsgd {

/// Below this |x* - y|^2 the one-point-convexity ratio is not reported.
inline constexpr double kDegenerateDist2 = 1e-12;

/// Monte Carlo certificate of <-E grad f(y - eta omega), x* - y> >= c |x* - y|^2 at the shadow
/// point y = x - eta grad f(x).
struct OpcCertificate {
  Point x;
  Point y;
  double inner = 0.0;
  double dist2 = 0.0;
  double c_hat = 0.0;  // NaN when degenerate
  std::uint64_t samples = 0;
  double ci_halfwidth = 0.0;
  bool pass = false;
  bool degenerate = false;

  /// (inner - ci) / dist2, the ratio certified at the requested confidence. NaN if degenerate.
  double c_lower() const;
};

OpcCertificate assumption1_estimate(const Objective& objective, const NoiseKernel& kernel,
                                    double eta, PointView x, PointView target, std::uint64_t n,
                                    RngStream& rng, double c_min = 0.0,
                                    double confidence = kDefaultConfidence);

struct RegionScan {
  std::vector<OpcCertificate> certificates;  // grid order
  std::size_t passed = 0;
  std::size_t degenerate = 0;
  double pass_fraction = 0.0;  // over all grid points
  /// Infimum of (inner - ci) / dist2 over non-degenerate points; NaN if there are none.
  double certified_c = 0.0;
};

/// Certificates at every grid point; point i draws from rng.substream(i).
RegionScan region_scan(const Objective& objective, const NoiseKernel& kernel, double eta,
                       PointView target, const std::vector<Point>& grid, double c_min,
                       std::uint64_t n, const RngStream& rng,
                       double confidence = kDefaultConfidence);

/// Cell-centred tensor grid with `points` cells per axis over [lo, hi]^d.
std::vector<Point> cell_centered_grid(std::size_t dimension, double lo, double hi,
                                      std::size_t points);

struct TrajectoryOpc {
  std::vector<double> inner;  // <-grad f(x_t), target - x_t>
  double min_inner = 0.0;     // over t >= start
  std::optional<std::size_t> first_positive;
};

TrajectoryOpc trajectory_opc(const Trajectory& trajectory, const Objective& objective,
                             PointView target, std::size_t start = 0);

struct NeighborhoodOpc {
  double min = 0.0;
  double mean = 0.0;
  double max = 0.0;
};

/// Statistics of <-grad f(w), target - center> for n points w uniform in the ball of `radius`
/// around `center`.
NeighborhoodOpc neighborhood_opc(const Objective& objective, PointView center, PointView target,
                                 double radius, std::uint64_t n, RngStream& rng);

struct LineProbe {
  std::vector<double> t;
  std::vector<double> values;         // f(t target + (1 - t) x)
  std::vector<int> directional_sign;  // sign of <grad f(p_t), target - x>
  bool degenerate = false;            // x == target
  bool above_endpoint = false;        // values[j] > values.back() for every t < 1
  bool strictly_decreasing = false;
  std::size_t sign_changes = 0;
};

LineProbe line_probe(const Objective& objective, PointView x, PointView target, std::size_t k);

/// Result of searching a grid of smoothing widths eta * r for the smallest one the region scan
/// certifies at c >= c_min.
struct NoiseCalibration {
  struct Attempt {
    double width = 0.0;
    double radius = 0.0;
    std::uint64_t samples = 0;  // sample size of the stage that decided
    bool accepted = false;
    double certified_c = 0.0;  // of the deciding stage; lower bound when accepted
  };
  std::vector<Attempt> attempts;
  std::optional<double> radius;  // chosen kernel radius
  std::optional<RegionScan> scan;
};

struct CalibrationOptions {
  NoiseKind kind = NoiseKind::uniform_ball;
  double eta = 0.0;
  double c_min = 0.5;
  std::vector<double> widths;                  // candidate eta * r values, searched in order
  std::vector<std::uint64_t> screen_samples;   // increasing; each may only reject
  std::uint64_t samples = 2'000'000;           // decisive scan
  double confidence = kDefaultConfidence;
};

/// Sweeps candidate widths in increasing order and returns the first radius whose full
/// region scan certifies c >= c_min. Screening stages reject a width as soon as some grid point
/// has an upper confidence bound (inner + ci) / dist2 below c_min; grid points are visited
/// nearest-to-target first and a scan stops at its first failing point.
NoiseCalibration calibrate_noise(const Objective& objective, PointView target,
                                 const std::vector<Point>& grid, const CalibrationOptions& options,
                                 const RngStream& rng);

/// Step size 0.9 * min{1/(2L), c/L^2, 1/(2c)}: valid for any certified c >= c_min.
double calibrated_eta(double c_min, double smoothness);

}  // namespace smoothsgd
