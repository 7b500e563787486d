#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "smoothsgd/point.hpp"
#include "smoothsgd/rng.hpp"

namespace smoothsgd {

enum class NoiseKind { zero, uniform_cube, uniform_ball };

std::string_view to_string(NoiseKind kind);
std::optional<NoiseKind> parse_noise_kind(std::string_view name);

/// Zero-mean gradient noise with a hard norm bound |omega| <= radius.
///
/// The built-in kinds do not depend on the evaluation point; `sample` still takes it so
/// point-dependent kernels fit the same signature.
class NoiseKernel {
 public:
  NoiseKernel(NoiseKind kind, double radius, std::size_t dimension);

  static NoiseKernel zero(std::size_t dimension) { return {NoiseKind::zero, 0.0, dimension}; }

  NoiseKind kind() const { return kind_; }
  double radius() const { return radius_; }
  std::size_t dimension() const { return dimension_; }

  /// True when every sample is exactly zero.
  bool degenerate() const { return kind_ == NoiseKind::zero || radius_ == 0.0; }

  Point sample(PointView at, RngStream& rng) const;
  void sample(PointView at, RngStream& rng, std::span<double> out) const;

  /// Same as `sample` without the dimension checks; for inner loops.
  void sample_unchecked(RngStream& rng, std::span<double> out) const;

  bool operator==(const NoiseKernel&) const = default;

 private:
  NoiseKind kind_;
  double radius_;
  std::size_t dimension_;
};

/// E|omega|^2 in closed form: zero -> 0, cube -> r^2/3, ball -> r^2 d / (d + 2).
double second_moment(const NoiseKernel& kernel);

}  // namespace smoothsgd
