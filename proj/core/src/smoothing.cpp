#include "smoothsgd/smoothing.hpp"

#include <cmath>
#include <string>

namespace smoothsgd {

double hoeffding_tail(std::uint64_t n, double range, double t) {
  require(n >= 1, "hoeffding_tail: n must be >= 1");
  require(range > 0.0, "hoeffding_tail: range must be > 0");
  require(t >= 0.0, "hoeffding_tail: t must be >= 0");
  return std::exp(-2.0 * static_cast<double>(n) * t * t / (range * range));
}

double hoeffding_halfwidth(std::uint64_t n, double range, double alpha) {
  require(n >= 1, "hoeffding_halfwidth: n must be >= 1");
  require(alpha > 0.0 && alpha < 1.0, "hoeffding_halfwidth: alpha must be in (0, 1)");
  return range * std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(n)));
}

double sinc(double u) {
  if (std::abs(u) < 1e-8) return 1.0 - u * u / 6.0;
  return std::sin(u) / u;
}

namespace {

void check_mc_args(const Objective& objective, const NoiseKernel& kernel, double eta,
                   PointView y, std::uint64_t n, double confidence, const char* what) {
  require(n >= 1, std::string(what) + ": n must be >= 1");
  require(confidence > 0.0 && confidence < 1.0, std::string(what) + ": confidence must be in (0, 1)");
  require(eta >= 0.0 && std::isfinite(eta), std::string(what) + ": eta must be finite and >= 0");
  require_dimension(objective.dimension(), y.size(), what);
  require_dimension(objective.dimension(), kernel.dimension(), what);
}

}  // namespace

SmoothedValue smoothed_value_mc(const Objective& objective, const NoiseKernel& kernel, double eta,
                                PointView y, std::uint64_t n, RngStream& rng, double confidence) {
  check_mc_args(objective, kernel, eta, y, n, confidence, "smoothed_value_mc");
  const std::size_t d = y.size();
  const double reach = eta * kernel.radius();
  const double grad_norm = norm(objective.gradient(y));
  const double half_range = reach * grad_norm + 0.5 * objective.smoothness() * reach * reach;

  SmoothedValue out;
  out.samples = n;
  if (reach == 0.0) {
    out.mean = objective.value(y);
    if (!std::isfinite(out.mean)) throw NumericalError("smoothed_value_mc: non-finite objective value");
    return out;
  }

  Point omega(d), probe(d);
  double sum = 0.0;
  for (std::uint64_t k = 0; k < n; ++k) {
    kernel.sample_unchecked(rng, omega);
    for (std::size_t i = 0; i < d; ++i) probe[i] = y[i] - eta * omega[i];
    const double v = objective.value_unchecked(probe);
    if (!std::isfinite(v)) throw NumericalError("smoothed_value_mc: non-finite objective value");
    sum += v;
  }
  out.mean = sum / static_cast<double>(n);
  out.range_bound = 2.0 * half_range;
  out.confidence_halfwidth =
      out.range_bound > 0.0 ? hoeffding_halfwidth(n, out.range_bound, 1.0 - confidence) : 0.0;
  return out;
}

SmoothedGradient smoothed_grad_mc(const Objective& objective, const NoiseKernel& kernel,
                                  double eta, PointView y, std::uint64_t n, RngStream& rng,
                                  double confidence) {
  check_mc_args(objective, kernel, eta, y, n, confidence, "smoothed_grad_mc");
  const std::size_t d = y.size();
  SmoothedGradient out;
  out.samples = n;
  out.mean.assign(d, 0.0);
  out.range_bound.assign(d, 0.0);
  out.confidence_halfwidth.assign(d, 0.0);
  objective.gradient_range(y, eta * kernel.radius(), out.range_bound);
  if (eta * kernel.radius() == 0.0) {
    out.mean = objective.gradient(y);
    out.range_bound.assign(d, 0.0);
    return out;
  }

  Point omega(d), probe(d), g(d);
  for (std::uint64_t k = 0; k < n; ++k) {
    kernel.sample_unchecked(rng, omega);
    for (std::size_t i = 0; i < d; ++i) probe[i] = y[i] - eta * omega[i];
    objective.gradient_unchecked(probe, g);
    for (std::size_t i = 0; i < d; ++i) out.mean[i] += g[i];
  }
  const double alpha = (1.0 - confidence) / static_cast<double>(d);
  for (std::size_t i = 0; i < d; ++i) {
    out.mean[i] /= static_cast<double>(n);
    if (!std::isfinite(out.mean[i])) {
      throw NumericalError("smoothed_grad_mc: non-finite gradient at coordinate " +
                           std::to_string(i));
    }
    if (out.range_bound[i] > 0.0) {
      out.confidence_halfwidth[i] = hoeffding_halfwidth(n, out.range_bound[i], alpha);
    }
  }
  return out;
}

namespace {

// Half-width of the per-coordinate uniform interval the kernel induces, or throws.
double separable_half_width(const SpikyParams& params, const NoiseKernel& kernel) {
  require_dimension(params.dimension, kernel.dimension(), "smoothed closed form kernel");
  if (kernel.degenerate()) return 0.0;
  switch (kernel.kind()) {
    case NoiseKind::zero:
      return 0.0;
    case NoiseKind::uniform_cube:
      return kernel.radius() / std::sqrt(static_cast<double>(kernel.dimension()));
    case NoiseKind::uniform_ball:
      if (kernel.dimension() == 1) return kernel.radius();
      break;
  }
  throw InvalidArgument("smoothed closed form: unsupported kernel '" +
                        std::string(to_string(kernel.kind())) + "' in dimension " +
                        std::to_string(kernel.dimension()));
}

}  // namespace

double smoothed_value_closed(const SpikyParams& params, const NoiseKernel& kernel, double eta,
                             PointView y) {
  require_dimension(params.dimension, y.size(), "smoothed_value_closed");
  const double h = separable_half_width(params, kernel);
  const double spread = eta * h;
  const double attenuation = sinc(params.freq * spread);
  double out = 0.0;
  for (double yi : y) {
    out += 0.5 * params.quad * (yi * yi + spread * spread / 3.0) +
           params.amp * std::sin(params.freq * yi) * attenuation;
  }
  return out;
}

Point smoothed_grad_closed(const SpikyParams& params, const NoiseKernel& kernel, double eta,
                           PointView y) {
  require_dimension(params.dimension, y.size(), "smoothed_grad_closed");
  const double h = separable_half_width(params, kernel);
  const double attenuation = sinc(params.freq * eta * h);
  Point out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    out[i] = params.quad * y[i] +
             params.amp * params.freq * std::cos(params.freq * y[i]) * attenuation;
  }
  return out;
}

double smoothed_value_closed(const SpikyParams& params, double r, double eta, PointView y) {
  require(params.dimension == 1, "smoothed_value_closed: interval form is one-dimensional");
  return smoothed_value_closed(params, NoiseKernel(NoiseKind::uniform_ball, r, 1), eta, y);
}

std::optional<double> smoothed_value_exact(const Objective& objective, const NoiseKernel& kernel,
                                           double eta, PointView y) {
  if (const auto* p = objective.spiky()) {
    if (kernel.kind() == NoiseKind::uniform_ball && kernel.dimension() > 1 &&
        !kernel.degenerate()) {
      return std::nullopt;
    }
    return smoothed_value_closed(*p, kernel, eta, y);
  }
  if (const auto* q = objective.quadratic()) {
    require_dimension(objective.dimension(), y.size(), "smoothed_value_exact");
    return 0.5 * dist2(y, q->center) + 0.5 * eta * eta * second_moment(kernel);
  }
  return std::nullopt;
}

std::optional<Point> smoothed_grad_exact(const Objective& objective, const NoiseKernel& kernel,
                                         double eta, PointView y) {
  if (const auto* p = objective.spiky()) {
    if (kernel.kind() == NoiseKind::uniform_ball && kernel.dimension() > 1 &&
        !kernel.degenerate()) {
      return std::nullopt;
    }
    return smoothed_grad_closed(*p, kernel, eta, y);
  }
  if (const auto* q = objective.quadratic()) {
    require_dimension(objective.dimension(), y.size(), "smoothed_grad_exact");
    Point out(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i] - q->center[i];
    return out;
  }
  return std::nullopt;
}

}  // namespace smoothsgd
