#include "smoothsgd/noise.hpp"

#include <algorithm>
#include <cmath>

namespace smoothsgd {

std::string_view to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::zero:
      return "zero";
    case NoiseKind::uniform_cube:
      return "uniform-cube";
    case NoiseKind::uniform_ball:
      return "uniform-ball";
  }
  return "unknown";
}

std::optional<NoiseKind> parse_noise_kind(std::string_view name) {
  if (name == "zero") return NoiseKind::zero;
  if (name == "uniform-cube") return NoiseKind::uniform_cube;
  if (name == "uniform-ball") return NoiseKind::uniform_ball;
  return std::nullopt;
}

NoiseKernel::NoiseKernel(NoiseKind kind, double radius, std::size_t dimension)
    : kind_(kind), radius_(kind == NoiseKind::zero ? 0.0 : radius), dimension_(dimension) {
  require(dimension >= 1, "NoiseKernel: dimension must be >= 1");
  require(std::isfinite(radius) && radius >= 0.0, "NoiseKernel: radius must be finite and >= 0");
}

Point NoiseKernel::sample(PointView at, RngStream& rng) const {
  Point out(dimension_);
  sample(at, rng, out);
  return out;
}

void NoiseKernel::sample(PointView at, RngStream& rng, std::span<double> out) const {
  require_dimension(dimension_, at.size(), "NoiseKernel::sample point");
  require_dimension(dimension_, out.size(), "NoiseKernel::sample output");
  sample_unchecked(rng, out);
}

namespace {

// Rounding in the products above can overshoot the radius by an ulp; pull back until the
// bound holds exactly.
void enforce_bound(std::span<double> out, double radius) {
  double n = norm(out);
  while (n > radius) {
    const double scale = std::nextafter(radius / n, 0.0);
    for (double& v : out) v *= scale;
    n = norm(out);
  }
}

}  // namespace

void NoiseKernel::sample_unchecked(RngStream& rng, std::span<double> out) const {
  if (degenerate()) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  const std::size_t d = dimension_;
  switch (kind_) {
    case NoiseKind::zero:
      break;
    case NoiseKind::uniform_cube: {
      const double half = radius_ / std::sqrt(static_cast<double>(d));
      for (double& v : out) v = half * (2.0 * rng.uniform() - 1.0);
      if (d > 1) enforce_bound(out, radius_);
      return;
    }
    case NoiseKind::uniform_ball: {
      if (d == 1) {
        out[0] = radius_ * (2.0 * rng.uniform() - 1.0);
        return;
      }
      if (d <= 3) {
        // Rejection from the enclosing cube; acceptance >= 52%.
        double n2 = 2.0;
        while (n2 > 1.0) {
          for (double& v : out) v = 2.0 * rng.uniform() - 1.0;
          n2 = norm2(out);
        }
        for (double& v : out) v *= radius_;
      } else {
        double n2 = 0.0;
        while (n2 == 0.0) {
          for (double& v : out) v = rng.normal();
          n2 = norm2(out);
        }
        const double rho = radius_ * std::pow(rng.uniform(), 1.0 / static_cast<double>(d));
        const double scale = rho / std::sqrt(n2);
        for (double& v : out) v *= scale;
      }
      enforce_bound(out, radius_);
      return;
    }
  }
  std::fill(out.begin(), out.end(), 0.0);
}

double second_moment(const NoiseKernel& kernel) {
  const double r2 = kernel.radius() * kernel.radius();
  const double d = static_cast<double>(kernel.dimension());
  switch (kernel.kind()) {
    case NoiseKind::zero:
      return 0.0;
    case NoiseKind::uniform_cube:
      return r2 / 3.0;
    case NoiseKind::uniform_ball:
      return r2 * d / (d + 2.0);
  }
  throw InvalidArgument("second_moment: unsupported kernel kind");
}

}  // namespace smoothsgd
