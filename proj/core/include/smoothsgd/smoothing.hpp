#pragma once

#include <cstdint>
#include <optional>

#include "smoothsgd/noise.hpp"
#include "smoothsgd/objectives.hpp"
#include "smoothsgd/point.hpp"
#include "smoothsgd/rng.hpp"

namespace smoothsgd {

inline constexpr double kDefaultConfidence = 0.99;
inline constexpr std::uint64_t kDefaultSmoothingSamples = 10'000;

/// Monte Carlo estimate of g(y) = E f(y - eta omega) with a two-sided Hoeffding interval.
struct SmoothedValue {
  double mean = 0.0;
  std::uint64_t samples = 0;
  double range_bound = 0.0;           // (b - a) fed to the tail bound
  double confidence_halfwidth = 0.0;  // sqrt((b - a)^2 ln(2/alpha) / 2n)
};

/// Monte Carlo estimate of grad g(y) = E grad f(y - eta omega). Intervals are per coordinate,
/// Bonferroni-corrected so that all d hold jointly at the requested confidence.
struct SmoothedGradient {
  Point mean;
  std::uint64_t samples = 0;
  Point range_bound;
  Point confidence_halfwidth;
};

/// One-sided Hoeffding tail exp(-2 n t^2 / range^2).
double hoeffding_tail(std::uint64_t n, double range, double t);

/// Two-sided halfwidth t with 2 exp(-2 n t^2 / range^2) = alpha.
double hoeffding_halfwidth(std::uint64_t n, double range, double alpha);

/// sin(u) / u with sinc(0) = 1.
double sinc(double u);

SmoothedValue smoothed_value_mc(const Objective& objective, const NoiseKernel& kernel, double eta,
                                PointView y, std::uint64_t n, RngStream& rng,
                                double confidence = kDefaultConfidence);

SmoothedGradient smoothed_grad_mc(const Objective& objective, const NoiseKernel& kernel,
                                  double eta, PointView y, std::uint64_t n, RngStream& rng,
                                  double confidence = kDefaultConfidence);

/// Closed-form convolution of the spiky landscape. Supported kernels: zero, uniform-cube in any
/// dimension (coordinate-separable), and uniform-ball in one dimension (an interval).
/// Throws InvalidArgument for other combinations.
double smoothed_value_closed(const SpikyParams& params, const NoiseKernel& kernel, double eta,
                             PointView y);
Point smoothed_grad_closed(const SpikyParams& params, const NoiseKernel& kernel, double eta,
                           PointView y);

/// One-dimensional interval kernel of half-width r:
/// (q/2)(y^2 + eta^2 r^2 / 3) + A sin(B y) sinc(B eta r).
double smoothed_value_closed(const SpikyParams& params, double r, double eta, PointView y);

/// Closed form for any objective whose family admits one: spiky (see above) or quadratic,
/// where g(y) = |y - c|^2 / 2 + eta^2 E|omega|^2 / 2. Empty when unsupported.
std::optional<double> smoothed_value_exact(const Objective& objective, const NoiseKernel& kernel,
                                           double eta, PointView y);
std::optional<Point> smoothed_grad_exact(const Objective& objective, const NoiseKernel& kernel,
                                         double eta, PointView y);

}  // namespace smoothsgd
