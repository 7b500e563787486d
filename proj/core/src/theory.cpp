#include "smoothsgd/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace smoothsgd {

TheoremConstants constants(double c, double eta, double smoothness, double radius,
                           double y0_dist2, std::uint64_t stay_steps) {
  require(c > 0.0 && std::isfinite(c), "constants: c must be finite and > 0");
  require(eta > 0.0 && std::isfinite(eta), "constants: eta must be finite and > 0");
  require(smoothness >= 0.0, "constants: L must be >= 0");
  require(radius >= 0.0, "constants: r must be >= 0");
  require(y0_dist2 >= 0.0, "constants: y0_dist2 must be >= 0");

  TheoremConstants k;
  k.c = c;
  k.eta = eta;
  k.smoothness = smoothness;
  k.radius = radius;
  k.y0_dist2 = y0_dist2;
  k.stay_steps = stay_steps;

  const double eta_l = eta * smoothness;
  k.lambda = 2.0 * eta * c - eta_l * eta_l;
  k.b = eta * eta * radius * radius * (1.0 + eta_l) * (1.0 + eta_l);
  k.stay_radius2 = 20.0 * k.b / k.lambda;
  k.zeta = 9.0 * static_cast<double>(stay_steps) / 4.0;
  k.mu = std::max(8.0, 42.0 * std::sqrt(std::max(0.0, std::log(k.zeta))));
  k.delta2 = k.mu * k.mu * k.b / k.lambda;

  k.eta_bound = 1.0 / (2.0 * c);
  if (smoothness > 0.0) {
    k.eta_bound =
        std::min({k.eta_bound, 1.0 / (2.0 * smoothness), c / (smoothness * smoothness)});
  }
  k.eta_valid = eta < k.eta_bound;

  if (k.lambda > 0.0) {
    double argument;
    if (k.b > 0.0) {
      argument = k.lambda * y0_dist2 / k.b;
    } else {
      argument = y0_dist2 > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    }
    if (argument <= 1.0) {
      k.t1_min = 0;
    } else if (std::isfinite(argument)) {
      k.t1_min = static_cast<std::uint64_t>(std::ceil(std::log(argument) / k.lambda));
    }
  }
  return k;
}

double divergence_threshold(double c_prime, double dist2, double grad_norm2) {
  if (!(grad_norm2 > 0.0)) {
    throw InvalidArgument("divergence_threshold: undefined for a zero gradient");
  }
  return 2.0 * c_prime * dist2 / grad_norm2;
}

DriftReport drift_check(const Objective& objective, const NoiseKernel& kernel, double eta,
                        double c, double smoothness, PointView y, PointView target,
                        std::uint64_t n, RngStream& rng, double confidence) {
  require(n >= 2, "drift_check: n must be >= 2");
  require(confidence > 0.0 && confidence < 1.0, "drift_check: confidence must be in (0, 1)");
  const std::size_t d = objective.dimension();
  require_dimension(d, y.size(), "drift_check y");
  require_dimension(d, target.size(), "drift_check target");
  require_dimension(d, kernel.dimension(), "drift_check kernel");

  DriftReport out;
  out.samples = n;
  const double eta_l = eta * smoothness;
  out.lambda = 2.0 * eta * c - eta_l * eta_l;
  out.b = eta * eta * kernel.radius() * kernel.radius() * (1.0 + eta_l) * (1.0 + eta_l);
  out.bound = (1.0 - out.lambda) * dist2(y, target) + out.b;

  // Every y_next lies within eta r (1 + eta L) = sqrt(b) of the noiseless step y - eta grad f(y).
  Point g(d), center(d);
  objective.gradient(y, g);
  for (std::size_t i = 0; i < d; ++i) center[i] = y[i] - eta * g[i];
  const double spread = eta * kernel.radius() * (1.0 + eta * objective.smoothness());
  const double d0 = std::sqrt(dist2(center, target));
  const double lo = std::max(0.0, d0 - spread);
  out.range_bound = (d0 + spread) * (d0 + spread) - lo * lo;

  Point omega(d), probe(d);
  double sum = 0.0;
  for (std::uint64_t k = 0; k < n; ++k) {
    kernel.sample_unchecked(rng, omega);
    for (std::size_t i = 0; i < d; ++i) probe[i] = y[i] - eta * omega[i];
    objective.gradient_unchecked(probe, g);
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const double next = probe[i] - eta * g[i] - target[i];
      s += next * next;
    }
    if (!std::isfinite(s)) throw NumericalError("drift_check: non-finite step");
    sum += s;
  }
  out.estimate = sum / static_cast<double>(n);
  out.ci_halfwidth =
      out.range_bound > 0.0 ? hoeffding_halfwidth(n, out.range_bound, 1.0 - confidence) : 0.0;
  out.pass = out.estimate <= out.bound + out.ci_halfwidth;
  return out;
}

StayReport stay_validate(const std::vector<Trajectory>& ensemble,
                         const TheoremConstants& constants, PointView target,
                         std::optional<std::uint64_t> start) {
  require(!ensemble.empty(), "stay_validate: empty ensemble");
  if (!start) {
    if (!constants.t1_min) {
      throw InvalidArgument("stay_validate: the hitting time is unbounded for these constants");
    }
    start = constants.t1_min;
  } else if (constants.t1_min) {
    require(*start >= *constants.t1_min, "stay_validate: start must be >= t1_min");
  }

  StayReport out;
  out.start = *start;
  out.window = constants.stay_steps;
  out.trials = ensemble.size();
  const std::uint64_t last = out.start + out.window;
  std::size_t hits = 0, stays = 0, both = 0;
  for (std::size_t k = 0; k < ensemble.size(); ++k) {
    const Trajectory& traj = ensemble[k];
    require_dimension(target.size(), traj.dimension, "stay_validate trajectory");
    if (traj.size() <= last) {
      throw InvalidArgument("stay_validate: trajectory " + std::to_string(k) + " has " +
                            std::to_string(traj.size()) + " records, needs " +
                            std::to_string(last + 1));
    }
    const bool hit = dist2(traj.y_at(out.start), target) <= constants.stay_radius2;
    bool stay = true;
    for (std::uint64_t t = out.start; t <= last && stay; ++t) {
      stay = dist2(traj.y_at(t), target) <= constants.delta2;
    }
    out.hit.push_back(hit);
    out.stay.push_back(stay);
    hits += hit;
    stays += stay;
    both += hit && stay;
  }
  const double n = static_cast<double>(ensemble.size());
  out.hit_fraction = static_cast<double>(hits) / n;
  out.stay_fraction = static_cast<double>(stays) / n;
  out.both_fraction = static_cast<double>(both) / n;
  return out;
}

}  // namespace smoothsgd
