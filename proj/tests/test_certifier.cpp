#include <gtest/gtest.h>

#include <cmath>

#include "smoothsgd/certifier.hpp"
#include "smoothsgd/optimizer.hpp"
#include "smoothsgd/smoothing.hpp"

using namespace smoothsgd;

namespace {

const Point kOrigin{0.0};

double closed_c(double x, double eta, double r) {
  const Objective f = make_spiky({});
  const double y = x - eta * f.gradient(Point{x})[0];
  const double g = smoothed_grad_closed(SpikyParams{}, NoiseKernel(NoiseKind::uniform_ball, r, 1),
                                        eta, Point{y})[0];
  return (-g * (0.0 - y)) / (y * y);
}

}  // namespace

TEST(Assumption1, QuadraticRatioIsOne) {
  const Objective f = make_quadratic(1, {0.0});
  for (NoiseKind kind : {NoiseKind::zero, NoiseKind::uniform_ball, NoiseKind::uniform_cube}) {
    RngStream rng(1, 0);
    const NoiseKernel k(kind, kind == NoiseKind::zero ? 0.0 : 1.0, 1);
    const OpcCertificate c = assumption1_estimate(f, k, 0.1, Point{2.0}, kOrigin, 10'000, rng);
    EXPECT_DOUBLE_EQ(c.y[0], 1.8);
    EXPECT_DOUBLE_EQ(c.dist2, 1.8 * 1.8);
    EXPECT_NEAR(c.c_hat, 1.0, c.ci_halfwidth / c.dist2 + 1e-12);
    EXPECT_FALSE(c.degenerate);
    EXPECT_EQ(c.samples, 10'000u);
  }
}

TEST(Assumption1, SincZeroLeavesPureQuadratic) {
  const Objective f = make_spiky({});
  const double eta = 0.01, r = M_PI / (10.0 * eta);
  const NoiseKernel k(NoiseKind::uniform_ball, r, 1);
  RngStream rng(2, 0);
  for (double x : {-2.0, 0.7, 2.9}) {
    const OpcCertificate c = assumption1_estimate(f, k, eta, Point{x}, kOrigin, 200'000, rng);
    EXPECT_NEAR(closed_c(x, eta, r), 1.0, 1e-12);
    EXPECT_NEAR(c.c_hat, 1.0, c.ci_halfwidth / c.dist2) << "x=" << x;
  }
}

TEST(Assumption1, SpikeBasinPointsAway) {
  // Without smoothing, find a shadow point where the gradient points away from the origin.
  const Objective f = make_spiky({});
  const double eta = 0.005;
  std::optional<double> found;
  for (double x = 0.3; x < 3.0 && !found; x += 1e-3) {
    const double y = x - eta * f.gradient(Point{x})[0];
    if (y * f.gradient(Point{y})[0] < 0) found = x;
  }
  ASSERT_TRUE(found.has_value());
  RngStream rng(3, 0);
  const OpcCertificate c =
      assumption1_estimate(f, NoiseKernel::zero(1), eta, Point{*found}, kOrigin, 2, rng, 0.1);
  EXPECT_LT(c.inner, 0.0);
  EXPECT_FALSE(c.pass);
}

TEST(Assumption1, DegenerateAtTarget) {
  const Objective f = make_quadratic(1, {0.0});
  RngStream rng(4, 0);
  const OpcCertificate c = assumption1_estimate(f, NoiseKernel(NoiseKind::uniform_ball, 1.0, 1),
                                                0.1, Point{0.0}, kOrigin, 100, rng, 0.5);
  EXPECT_TRUE(c.degenerate);
  EXPECT_FALSE(c.pass);
  EXPECT_TRUE(std::isnan(c.c_hat));
  EXPECT_TRUE(std::isnan(c.c_lower()));
}

TEST(Assumption1, RejectsBadArguments) {
  const Objective f = make_quadratic(1, {0.0});
  RngStream rng(0, 0);
  const NoiseKernel k = NoiseKernel::zero(1);
  EXPECT_THROW(assumption1_estimate(f, k, 0.1, Point{1.0}, kOrigin, 1, rng), InvalidArgument);
  EXPECT_THROW(assumption1_estimate(f, k, 0.0, Point{1.0}, kOrigin, 10, rng), InvalidArgument);
  EXPECT_THROW(assumption1_estimate(f, k, 0.1, Point{1.0}, Point{0.0, 0.0}, 10, rng),
               InvalidArgument);
}

TEST(Assumption1, PassMatchesDefinition) {
  const Objective f = make_spiky({1.0, 1.0, 10.0, 2});
  RngStream rng(5, 0);
  const NoiseKernel k(NoiseKind::uniform_ball, 20.0, 2);
  for (int i = 0; i < 200; ++i) {
    const Point x{rng.uniform(-3, 3), rng.uniform(-3, 3)};
    const double c_min = rng.uniform(0.0, 1.5);
    const OpcCertificate c =
        assumption1_estimate(f, k, 0.01, x, Point{0.0, 0.0}, 200, rng, c_min);
    EXPECT_EQ(c.pass, c.inner - c.ci_halfwidth >= c_min * c.dist2);
    EXPECT_DOUBLE_EQ(c.c_hat, c.inner / c.dist2);
    EXPECT_DOUBLE_EQ(c.c_lower(), (c.inner - c.ci_halfwidth) / c.dist2);
  }
}

TEST(Assumption1, ZeroKernelIsPlainOnePointConvexity) {
  const Objective f = make_spiky({1.0, 1.0, 10.0, 2});
  RngStream rng(6, 0);
  for (int i = 0; i < 50; ++i) {
    const Point x{rng.uniform(-3, 3), rng.uniform(-3, 3)};
    const OpcCertificate c =
        assumption1_estimate(f, NoiseKernel::zero(2), 0.003, x, Point{0.0, 0.0}, 2, rng);
    const Point g = f.gradient(c.y);
    EXPECT_NEAR(c.inner, dot(g, c.y), 1e-12 * std::max(1.0, std::abs(c.inner)));
  }
}

TEST(Assumption1, SoundAgainstClosedForm) {
  // |c_hat - c_closed| <= ci / dist2 for at least 99% of 1000 randomized certificates.
  const Objective f = make_spiky({});
  RngStream rng(7, 0);
  int covered = 0;
  for (int i = 0; i < 1000; ++i) {
    const double x = rng.uniform(-3, 3);
    const double eta = rng.uniform(0.001, 0.01);
    const double r = rng.uniform(0.0, 40.0);
    const NoiseKernel k(NoiseKind::uniform_ball, r, 1);
    const OpcCertificate c = assumption1_estimate(f, k, eta, Point{x}, kOrigin, 2000, rng);
    if (c.degenerate) continue;
    covered += std::abs(c.c_hat - closed_c(x, eta, r)) <= c.ci_halfwidth / c.dist2;
  }
  EXPECT_GE(covered, 990);
}

TEST(Assumption1, ScalingCovariance) {
  // s f with step eta / s and radius s r keeps y and the perturbation eta omega unchanged.
  const Objective f = make_spiky({});
  const double s = 2.0, eta = 0.004, r = 12.0;
  const Objective g = scaled(f, s);
  for (double x : {-2.3, 0.45, 1.7}) {
    RngStream a(8, 1), b(8, 1);
    const OpcCertificate cf = assumption1_estimate(
        f, NoiseKernel(NoiseKind::uniform_ball, r, 1), eta, Point{x}, kOrigin, 5000, a);
    const OpcCertificate cg = assumption1_estimate(
        g, NoiseKernel(NoiseKind::uniform_ball, s * r, 1), eta / s, Point{x}, kOrigin, 5000, b);
    EXPECT_DOUBLE_EQ(cg.y[0], cf.y[0]);
    EXPECT_NEAR(cg.inner, s * cf.inner, 1e-12 * std::abs(cf.inner));
    EXPECT_NEAR(cg.c_hat, s * cf.c_hat, 1e-12 * std::abs(cf.c_hat));
  }
}

TEST(Grid, CellCentered) {
  const auto g = cell_centered_grid(1, -3, 3, 30);
  ASSERT_EQ(g.size(), 30u);
  EXPECT_NEAR(g.front()[0], -2.9, 1e-15);
  EXPECT_NEAR(g.back()[0], 2.9, 1e-15);
  for (const Point& p : g) EXPECT_GE(std::abs(p[0]), 0.1 - 1e-15);
  EXPECT_EQ(cell_centered_grid(2, -1, 1, 4).size(), 16u);
  EXPECT_THROW(cell_centered_grid(1, 1, -1, 4), InvalidArgument);
}

TEST(RegionScan, QuadraticPassesEverywhere) {
  const Objective f = make_quadratic(1, {0.0});
  const RegionScan s = region_scan(f, NoiseKernel(NoiseKind::uniform_ball, 1.0, 1), 0.1, kOrigin,
                                   cell_centered_grid(1, -3, 3, 50), 0.9, 10'000, RngStream(9, 0));
  EXPECT_EQ(s.passed, 50u);
  EXPECT_EQ(s.pass_fraction, 1.0);
  EXPECT_GE(s.certified_c, 0.9);
  EXPECT_EQ(s.degenerate, 0u);
}

TEST(RegionScan, SpikyWithoutNoiseFails) {
  const Objective f = make_spiky({});
  const RegionScan s = region_scan(f, NoiseKernel::zero(1), 0.005, kOrigin,
                                   cell_centered_grid(1, -3, 3, 300), 0.1, 2, RngStream(10, 0));
  EXPECT_GT(s.passed, 0u);
  EXPECT_LT(s.passed, 300u);
  EXPECT_LT(s.certified_c, 0.0);
}

TEST(RegionScan, ReportsDegeneratePoints) {
  const Objective f = make_quadratic(1, {0.0});
  const std::vector<Point> grid{{0.0}, {1.0}};
  const RegionScan s =
      region_scan(f, NoiseKernel::zero(1), 0.1, kOrigin, grid, 0.5, 2, RngStream(11, 0));
  EXPECT_EQ(s.degenerate, 1u);
  EXPECT_EQ(s.passed, 1u);
  EXPECT_DOUBLE_EQ(s.certified_c, 1.0);
  const RegionScan only = region_scan(f, NoiseKernel::zero(1), 0.1, kOrigin, {{0.0}}, 0.5, 2,
                                      RngStream(11, 0));
  EXPECT_EQ(only.degenerate, 1u);
  EXPECT_TRUE(std::isnan(only.certified_c));
  EXPECT_THROW(region_scan(f, NoiseKernel::zero(1), 0.1, kOrigin, {}, 0.5, 2, RngStream(0, 0)),
               InvalidArgument);
}

TEST(RegionScan, UsesPerPointSubstreams) {
  const Objective f = make_spiky({});
  const NoiseKernel k(NoiseKind::uniform_ball, 30.0, 1);
  const auto grid = cell_centered_grid(1, -3, 3, 10);
  const RegionScan s = region_scan(f, k, 0.01, kOrigin, grid, 0.5, 500, RngStream(12, 0));
  RngStream sub = RngStream(12, 0).substream(7);
  const OpcCertificate c = assumption1_estimate(f, k, 0.01, grid[7], kOrigin, 500, sub, 0.5);
  EXPECT_EQ(s.certificates[7].inner, c.inner);
}

TEST(TrajectoryOpc, QuadraticInnerIsSquaredDistance) {
  const Objective f = make_quadratic(2, {1.0, 1.0});
  const Trajectory t = gd_run(f, 0.3, 30, Point{4.0, -2.0});
  const TrajectoryOpc o = trajectory_opc(t, f, *f.target());
  ASSERT_EQ(o.inner.size(), t.size());
  for (std::size_t k = 0; k < t.size(); ++k) {
    EXPECT_NEAR(o.inner[k], dist2(t.x_at(k), *f.target()), 1e-12);
    EXPECT_GT(o.inner[k], 0.0);
  }
  EXPECT_EQ(o.first_positive, 0u);
  EXPECT_GT(o.min_inner, 0.0);
}

TEST(TrajectoryOpc, StuckSpikyRunEndsStationary) {
  const Objective f = make_spiky({});
  const Trajectory t = gd_run(f, 0.01, 5000, Point{2.0});
  const TrajectoryOpc o = trajectory_opc(t, f, kOrigin);
  EXPECT_LT(std::abs(o.inner.back()), 1e-8);
  const TrajectoryOpc tail = trajectory_opc(t, f, kOrigin, 4000);
  EXPECT_LT(std::abs(tail.min_inner), 1e-8);
  EXPECT_THROW(trajectory_opc(Trajectory{}, f, kOrigin), InvalidArgument);
}

TEST(NeighborhoodOpc, Examples) {
  const Objective q = make_quadratic(1, {0.0});
  RngStream rng(13, 0);
  const NeighborhoodOpc n = neighborhood_opc(q, Point{2.0}, kOrigin, 0.5, 100, rng);
  EXPECT_GE(n.min, 2.0 * 1.5);
  EXPECT_LE(n.min, n.mean);
  EXPECT_LE(n.mean, n.max);
  const NeighborhoodOpc z = neighborhood_opc(q, Point{2.0}, kOrigin, 0.0, 10, rng);
  EXPECT_EQ(z.min, 4.0);
  EXPECT_EQ(z.mean, 4.0);
  EXPECT_EQ(z.max, 4.0);
  // Around a spike the directional derivative changes sign.
  const NeighborhoodOpc s =
      neighborhood_opc(make_spiky({}), Point{1.0}, kOrigin, 0.2, 200, rng);
  EXPECT_LT(s.min, 0.0);
  EXPECT_GT(s.max, 0.0);
  EXPECT_THROW(neighborhood_opc(q, Point{2.0}, kOrigin, -1.0, 10, rng), InvalidArgument);
  EXPECT_THROW(neighborhood_opc(q, Point{2.0}, kOrigin, 1.0, 0, rng), InvalidArgument);
}

TEST(LineProbe, QuadraticIsMonotone) {
  const Objective f = make_quadratic(2, {1.0, 0.0});
  const LineProbe p = line_probe(f, Point{-2.0, 3.0}, *f.target(), 50);
  EXPECT_FALSE(p.degenerate);
  EXPECT_TRUE(p.strictly_decreasing);
  EXPECT_TRUE(p.above_endpoint);
  EXPECT_EQ(p.sign_changes, 0u);
  EXPECT_EQ(p.t.front(), 0.0);
  EXPECT_EQ(p.t.back(), 1.0);
}

TEST(LineProbe, SpikesAreVisible) {
  const LineProbe p = line_probe(make_spiky({}), Point{3.0}, kOrigin, 400);
  EXPECT_FALSE(p.strictly_decreasing);
  EXPECT_GT(p.sign_changes, 5u);
}

TEST(LineProbe, DegenerateAndInvalid) {
  const Objective f = make_quadratic(1, {0.0});
  const LineProbe p = line_probe(f, Point{0.0}, kOrigin, 5);
  EXPECT_TRUE(p.degenerate);
  for (double v : p.values) EXPECT_EQ(v, 0.0);
  EXPECT_THROW(line_probe(f, Point{1.0}, kOrigin, 1), InvalidArgument);
}

TEST(Calibration, StepSize) {
  EXPECT_NEAR(calibrated_eta(0.5, 101.0), 0.9 * 0.5 / (101.0 * 101.0), 1e-18);
  EXPECT_NEAR(calibrated_eta(1.0, 1.0), 0.45, 1e-15);
}

TEST(Calibration, FindsSincZeroWidth) {
  const Objective f = make_spiky({});
  CalibrationOptions o;
  o.eta = calibrated_eta(0.5, f.smoothness());
  o.widths = {0.05, 0.1, 0.2, M_PI / 10.0};
  o.screen_samples = {500, 5000};
  o.samples = 200'000;
  const auto grid = cell_centered_grid(1, -3, 3, 6);
  const NoiseCalibration c = calibrate_noise(f, kOrigin, grid, o, RngStream(14, 0));
  ASSERT_TRUE(c.radius.has_value());
  EXPECT_NEAR(*c.radius * o.eta, M_PI / 10.0, 1e-12);
  ASSERT_TRUE(c.scan.has_value());
  EXPECT_GE(c.scan->certified_c, 0.5);
  EXPECT_EQ(c.scan->certificates.size(), grid.size());
  ASSERT_EQ(c.attempts.size(), 4u);
  for (int i = 0; i < 3; ++i) EXPECT_FALSE(c.attempts[i].accepted);
  EXPECT_TRUE(c.attempts[3].accepted);
}

TEST(Calibration, ReportsFailure) {
  const Objective f = make_spiky({});
  CalibrationOptions o;
  o.eta = calibrated_eta(0.5, f.smoothness());
  o.widths = {0.01, 0.02};
  o.screen_samples = {500};
  o.samples = 2000;
  const NoiseCalibration c =
      calibrate_noise(f, kOrigin, cell_centered_grid(1, -3, 3, 6), o, RngStream(15, 0));
  EXPECT_FALSE(c.radius.has_value());
  EXPECT_FALSE(c.scan.has_value());
  EXPECT_EQ(c.attempts.size(), 2u);
}

// Measured 0 of 20 at both the calibrated and the default-experiment step sizes: the raw gradient at
// x_t carries the full +-AB spike term, so some early step always points away from the final
// iterate. Kept with its original threshold; see the project notes.
TEST(TrajectoryOpc, DISABLED_CalibratedNoiseTowardFinalIterate) {
  const Objective f = make_spiky({});
  const double eta = calibrated_eta(0.5, f.smoothness()), r = 0.313 / eta;
  int positive = 0;
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    RngStream rng(42, trial);
    const Point x0{rng.uniform(-3, 3)};
    const Trajectory t = sgd_run(
        f, StepSchedule::constant(eta, 500, NoiseKernel(NoiseKind::uniform_ball, r, 1)), x0, rng);
    const Point target(t.final_x().begin(), t.final_x().end());
    const TrajectoryOpc o = trajectory_opc(t, f, target, 5);
    double m = INFINITY;
    for (std::size_t k = 5; k + 1 < o.inner.size(); ++k) m = std::min(m, o.inner[k]);
    positive += m > 0;
  }
  EXPECT_GE(positive, 18);
}
