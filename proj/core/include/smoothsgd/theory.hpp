#pragma once

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

/// Constants of the convergence-and-stay guarantee for SGD on a c-one-point-convex smoothed
/// landscape. Every derived field is a pure function of the six inputs.
struct TheoremConstants {
  // inputs
  double c = 0.0;
  double eta = 0.0;
  double smoothness = 0.0;  // L
  double radius = 0.0;      // r
  double y0_dist2 = 0.0;
  std::uint64_t stay_steps = 0;  // T2

  // derived
  double lambda = 0.0;   // 2 eta c - eta^2 L^2
  double b = 0.0;        // eta^2 r^2 (1 + eta L)^2
  /// ceil(ln(lambda y0_dist2 / b) / lambda), 0 when the log argument is <= 1, empty when the
  /// radius cannot be reached (b = 0 with y0 != x*, or lambda <= 0).
  std::optional<std::uint64_t> t1_min;
  double stay_radius2 = 0.0;  // 20 b / lambda
  double zeta = 0.0;          // 9 T2 / 4
  double mu = 0.0;            // max(8, 42 sqrt(ln zeta))
  double delta2 = 0.0;        // mu^2 b / lambda
  double eta_bound = 0.0;     // min{1/(2L), c/L^2, 1/(2c)}
  bool eta_valid = false;     // eta < eta_bound
};

TheoremConstants constants(double c, double eta, double smoothness, double radius,
                           double y0_dist2, std::uint64_t stay_steps);

/// 2 c' dist2 / |grad|^2: gradient descent with any larger step size moves away from x* when
/// <-grad f(x), x* - x> <= c' |x* - x|^2.
double divergence_threshold(double c_prime, double dist2, double grad_norm2);

/// Monte Carlo check of one step of the shadow recursion:
/// E|y_next - x*|^2 <= (1 - lambda)|y - x*|^2 + b, y_next = y - eta omega - eta grad f(y - eta omega).
struct DriftReport {
  double estimate = 0.0;  // mean of |y_next - x*|^2
  double ci_halfwidth = 0.0;
  double range_bound = 0.0;
  double bound = 0.0;  // (1 - lambda)|y - x*|^2 + b
  double lambda = 0.0;
  double b = 0.0;
  std::uint64_t samples = 0;
  bool pass = false;  // estimate <= bound + ci
};

DriftReport drift_check(const Objective& objective, const NoiseKernel& kernel, double eta,
                        double c, double smoothness, PointView y, PointView target,
                        std::uint64_t n, RngStream& rng, double confidence = kDefaultConfidence);

struct StayReport {
  std::uint64_t start = 0;  // T
  std::uint64_t window = 0;  // T2
  std::size_t trials = 0;
  std::vector<bool> hit;   // |y_T - x*|^2 <= stay_radius2
  std::vector<bool> stay;  // |y_t - x*|^2 <= delta2 for t in [T, T + T2]
  double hit_fraction = 0.0;
  double stay_fraction = 0.0;
  double both_fraction = 0.0;
};

/// Measures the shadow sequence of each trajectory against the constants. The window starts at
/// `start` (default t1_min) and spans stay_steps further records. Throws if a trajectory is too
/// short or t1_min is unreachable and no start is given.
StayReport stay_validate(const std::vector<Trajectory>& ensemble,
                         const TheoremConstants& constants, PointView target,
                         std::optional<std::uint64_t> start = std::nullopt);

}  // namespace smoothsgd
