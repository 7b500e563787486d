#include "smoothsgd/certifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace smoothsgd {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

double OpcCertificate::c_lower() const {
  return degenerate ? kNaN : (inner - ci_halfwidth) / dist2;
}

OpcCertificate assumption1_estimate(const Objective& objective, const NoiseKernel& kernel,
                                    double eta, PointView x, PointView target, std::uint64_t n,
                                    RngStream& rng, double c_min, double confidence) {
  require(n >= 2, "assumption1_estimate: n must be >= 2");
  require(eta > 0.0, "assumption1_estimate: eta must be > 0");
  const std::size_t d = objective.dimension();
  require_dimension(d, x.size(), "assumption1_estimate x");
  require_dimension(d, target.size(), "assumption1_estimate target");

  OpcCertificate cert;
  cert.x.assign(x.begin(), x.end());
  const Point g = objective.gradient(x);
  cert.y.resize(d);
  for (std::size_t i = 0; i < d; ++i) cert.y[i] = x[i] - eta * g[i];

  const SmoothedGradient sg = smoothed_grad_mc(objective, kernel, eta, cert.y, n, rng, confidence);
  for (std::size_t i = 0; i < d; ++i) {
    const double toward = target[i] - cert.y[i];
    cert.inner -= sg.mean[i] * toward;
    cert.ci_halfwidth += sg.confidence_halfwidth[i] * std::abs(toward);
    cert.dist2 += toward * toward;
  }
  cert.samples = n;
  cert.degenerate = cert.dist2 < kDegenerateDist2;
  if (cert.degenerate) {
    cert.c_hat = kNaN;
    cert.pass = false;
  } else {
    cert.c_hat = cert.inner / cert.dist2;
    cert.pass = cert.inner - cert.ci_halfwidth >= c_min * cert.dist2;
  }
  return cert;
}

namespace {

void summarize(RegionScan& scan) {
  scan.passed = 0;
  scan.degenerate = 0;
  scan.certified_c = kNaN;
  bool any = false;
  for (const auto& c : scan.certificates) {
    if (c.degenerate) {
      ++scan.degenerate;
      continue;
    }
    if (c.pass) ++scan.passed;
    const double lower = c.c_lower();
    scan.certified_c = any ? std::min(scan.certified_c, lower) : lower;
    any = true;
  }
  scan.pass_fraction = scan.certificates.empty()
                           ? 0.0
                           : static_cast<double>(scan.passed) /
                                 static_cast<double>(scan.certificates.size());
}

}  // namespace

RegionScan region_scan(const Objective& objective, const NoiseKernel& kernel, double eta,
                       PointView target, const std::vector<Point>& grid, double c_min,
                       std::uint64_t n, const RngStream& rng, double confidence) {
  require(!grid.empty(), "region_scan: grid must not be empty");
  RegionScan scan;
  scan.certificates.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    RngStream point_rng = rng.substream(i);
    scan.certificates.push_back(assumption1_estimate(objective, kernel, eta, grid[i], target, n,
                                                     point_rng, c_min, confidence));
  }
  summarize(scan);
  return scan;
}

std::vector<Point> cell_centered_grid(std::size_t dimension, double lo, double hi,
                                      std::size_t points) {
  require(dimension >= 1, "cell_centered_grid: dimension must be >= 1");
  require(points >= 1, "cell_centered_grid: points must be >= 1");
  require(hi > lo, "cell_centered_grid: hi must exceed lo");
  std::vector<double> axis(points);
  const double width = (hi - lo) / static_cast<double>(points);
  for (std::size_t k = 0; k < points; ++k) axis[k] = lo + (static_cast<double>(k) + 0.5) * width;

  std::size_t total = 1;
  for (std::size_t j = 0; j < dimension; ++j) total *= points;
  std::vector<Point> grid;
  grid.reserve(total);
  std::vector<std::size_t> index(dimension, 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    Point p(dimension);
    for (std::size_t j = 0; j < dimension; ++j) p[j] = axis[index[j]];
    grid.push_back(std::move(p));
    for (std::size_t j = dimension; j-- > 0;) {
      if (++index[j] < points) break;
      index[j] = 0;
    }
  }
  return grid;
}

TrajectoryOpc trajectory_opc(const Trajectory& trajectory, const Objective& objective,
                             PointView target, std::size_t start) {
  require(!trajectory.empty(), "trajectory_opc: trajectory must not be empty");
  const std::size_t d = objective.dimension();
  require_dimension(d, trajectory.dimension, "trajectory_opc trajectory");
  require_dimension(d, target.size(), "trajectory_opc target");

  TrajectoryOpc out;
  out.inner.reserve(trajectory.size());
  Point g(d);
  out.min_inner = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < trajectory.size(); ++t) {
    const PointView x = trajectory.x_at(t);
    objective.gradient_unchecked(x, g);
    double inner = 0.0;
    for (std::size_t i = 0; i < d; ++i) inner -= g[i] * (target[i] - x[i]);
    out.inner.push_back(inner);
    if (t >= start) out.min_inner = std::min(out.min_inner, inner);
    if (!out.first_positive && inner > 0.0) out.first_positive = t;
  }
  return out;
}

NeighborhoodOpc neighborhood_opc(const Objective& objective, PointView center, PointView target,
                                 double radius, std::uint64_t n, RngStream& rng) {
  require(radius >= 0.0, "neighborhood_opc: radius must be >= 0");
  require(n >= 1, "neighborhood_opc: n must be >= 1");
  const std::size_t d = objective.dimension();
  require_dimension(d, center.size(), "neighborhood_opc center");
  require_dimension(d, target.size(), "neighborhood_opc target");

  const NoiseKernel ball(NoiseKind::uniform_ball, radius, d);
  Point offset(d), w(d), g(d);
  NeighborhoodOpc out{std::numeric_limits<double>::infinity(), 0.0,
                      -std::numeric_limits<double>::infinity()};
  double sum = 0.0;
  for (std::uint64_t k = 0; k < n; ++k) {
    ball.sample_unchecked(rng, offset);
    for (std::size_t i = 0; i < d; ++i) w[i] = center[i] + offset[i];
    objective.gradient_unchecked(w, g);
    double inner = 0.0;
    for (std::size_t i = 0; i < d; ++i) inner -= g[i] * (target[i] - center[i]);
    out.min = std::min(out.min, inner);
    out.max = std::max(out.max, inner);
    sum += inner;
  }
  out.mean = sum / static_cast<double>(n);
  return out;
}

LineProbe line_probe(const Objective& objective, PointView x, PointView target, std::size_t k) {
  require(k >= 2, "line_probe: k must be >= 2");
  const std::size_t d = objective.dimension();
  require_dimension(d, x.size(), "line_probe x");
  require_dimension(d, target.size(), "line_probe target");

  LineProbe out;
  out.degenerate = dist2(x, target) == 0.0;
  Point p(d), g(d);
  int last_sign = 0;
  for (std::size_t j = 0; j < k; ++j) {
    const double t = static_cast<double>(j) / static_cast<double>(k - 1);
    for (std::size_t i = 0; i < d; ++i) p[i] = t * target[i] + (1.0 - t) * x[i];
    out.t.push_back(t);
    out.values.push_back(objective.value_unchecked(p));
    objective.gradient_unchecked(p, g);
    double slope = 0.0;
    for (std::size_t i = 0; i < d; ++i) slope += g[i] * (target[i] - x[i]);
    const int sign = (slope > 0.0) - (slope < 0.0);
    out.directional_sign.push_back(sign);
    if (sign != 0) {
      if (last_sign != 0 && sign != last_sign) ++out.sign_changes;
      last_sign = sign;
    }
  }
  if (!out.degenerate) {
    const double end = out.values.back();
    out.above_endpoint = std::all_of(out.values.begin(), out.values.end() - 1,
                                     [end](double v) { return v > end; });
    out.strictly_decreasing = true;
    for (std::size_t j = 1; j < k; ++j) {
      if (!(out.values[j] < out.values[j - 1])) out.strictly_decreasing = false;
    }
  }
  return out;
}

double calibrated_eta(double c_min, double smoothness) {
  require(c_min > 0.0, "calibrated_eta: c_min must be > 0");
  double bound = 1.0 / (2.0 * c_min);
  if (smoothness > 0.0) {
    bound = std::min({bound, 1.0 / (2.0 * smoothness), c_min / (smoothness * smoothness)});
  }
  return 0.9 * bound;
}

NoiseCalibration calibrate_noise(const Objective& objective, PointView target,
                                 const std::vector<Point>& grid, const CalibrationOptions& options,
                                 const RngStream& rng) {
  require(!grid.empty(), "calibrate_noise: grid must not be empty");
  require(options.eta > 0.0, "calibrate_noise: eta must be > 0");
  require(!options.widths.empty(), "calibrate_noise: no candidate widths");
  require(std::is_sorted(options.widths.begin(), options.widths.end()),
          "calibrate_noise: widths must be increasing");
  require(std::is_sorted(options.screen_samples.begin(), options.screen_samples.end()),
          "calibrate_noise: screen sample sizes must be increasing");

  std::vector<std::size_t> order(grid.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return dist2(grid[a], target) < dist2(grid[b], target);
  });

  const std::size_t d = objective.dimension();
  NoiseCalibration out;
  for (std::size_t w = 0; w < options.widths.size(); ++w) {
    const double width = options.widths[w];
    require(width >= 0.0, "calibrate_noise: widths must be >= 0");
    const NoiseKernel kernel(options.kind, width / options.eta, d);
    const RngStream width_rng = rng.substream(w);

    NoiseCalibration::Attempt attempt{width, kernel.radius(), 0, false, kNaN};
    bool rejected = false;
    for (std::size_t s = 0; s < options.screen_samples.size() && !rejected; ++s) {
      const RngStream stage_rng = width_rng.substream(s);
      attempt.samples = options.screen_samples[s];
      for (std::size_t i : order) {
        RngStream point_rng = stage_rng.substream(i);
        const auto cert = assumption1_estimate(objective, kernel, options.eta, grid[i], target,
                                               options.screen_samples[s], point_rng,
                                               options.c_min, options.confidence);
        if (cert.degenerate) continue;
        const double upper = (cert.inner + cert.ci_halfwidth) / cert.dist2;
        if (upper < options.c_min) {
          attempt.certified_c = cert.c_lower();
          rejected = true;
          break;
        }
      }
    }
    if (rejected) {
      out.attempts.push_back(attempt);
      continue;
    }

    // Decisive scan: same streams as region_scan(..., width_rng.substream(screens)).
    const RngStream scan_rng = width_rng.substream(options.screen_samples.size());
    RegionScan scan;
    scan.certificates.resize(grid.size());
    attempt.samples = options.samples;
    bool failed = false;
    for (std::size_t i : order) {
      RngStream point_rng = scan_rng.substream(i);
      scan.certificates[i] = assumption1_estimate(objective, kernel, options.eta, grid[i], target,
                                                  options.samples, point_rng, options.c_min,
                                                  options.confidence);
      const auto& cert = scan.certificates[i];
      if (!cert.degenerate && !cert.pass) {
        attempt.certified_c = cert.c_lower();
        failed = true;
        break;
      }
    }
    if (!failed) {
      summarize(scan);
      if (std::isfinite(scan.certified_c) && scan.certified_c >= options.c_min) {
        attempt.accepted = true;
        attempt.certified_c = scan.certified_c;
        out.attempts.push_back(attempt);
        out.radius = kernel.radius();
        out.scan = std::move(scan);
        return out;
      }
      attempt.certified_c = scan.certified_c;
    }
    out.attempts.push_back(attempt);
  }
  return out;
}

}  // namespace smoothsgd
