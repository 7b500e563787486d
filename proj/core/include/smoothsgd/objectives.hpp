#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <variant>

#include "smoothsgd/point.hpp"

namespace smoothsgd {

/// Parameters of the spiky landscape f(x) = (q/2)|x|^2 + A * sum_i sin(B x_i).
struct SpikyParams {
  double quad = 1.0;   // q > 0
  double amp = 1.0;    // A >= 0
  double freq = 10.0;  // B > 0
  std::size_t dimension = 1;

  /// L = q + A B^2.
  double smoothness() const { return quad + amp * freq * freq; }

  bool operator==(const SpikyParams&) const = default;
};

/// Parameters of f(x) = |x - center|^2 / 2.
struct QuadraticParams {
  Point center;
  bool operator==(const QuadraticParams&) const = default;
};

/// Analytic family of an objective, when known. Enables closed-form smoothing oracles.
using Family = std::variant<std::monostate, SpikyParams, QuadraticParams>;

/// Value and gradient oracles of a differentiable landscape. Implementations are immutable.
class Landscape {
 public:
  virtual ~Landscape() = default;
  virtual double value(PointView x) const = 0;
  virtual void gradient(PointView x, std::span<double> out) const = 0;

  /// Upper bound on max - min of each gradient coordinate over the ball of the given radius
  /// around `center`. The default uses only smoothness: 2 * L * radius.
  virtual void gradient_range(PointView center, double radius, double smoothness,
                              std::span<double> out) const;
};

/// A differentiable objective with known smoothness constant L, a domain box and an
/// optional reference target x*.
///
/// Objective is a cheap value type sharing an immutable landscape; all oracles are safe to
/// call concurrently. Every oracle checks the argument dimension.
class Objective {
 public:
  Objective(std::shared_ptr<const Landscape> landscape, std::size_t dimension, double smoothness,
            Box domain, std::optional<Point> target = std::nullopt,
            Family family = {});

  std::size_t dimension() const { return dimension_; }
  double smoothness() const { return smoothness_; }
  const Box& domain() const { return domain_; }
  const std::optional<Point>& target() const { return target_; }

  const Family& family() const { return family_; }
  const SpikyParams* spiky() const { return std::get_if<SpikyParams>(&family_); }
  const QuadraticParams* quadratic() const { return std::get_if<QuadraticParams>(&family_); }

  double value(PointView x) const;
  Point gradient(PointView x) const;
  void gradient(PointView x, std::span<double> out) const;
  void gradient_range(PointView center, double radius, std::span<double> out) const;

  /// Unchecked variants for inner loops where dimensions were validated up front.
  double value_unchecked(PointView x) const { return landscape_->value(x); }
  void gradient_unchecked(PointView x, std::span<double> out) const {
    landscape_->gradient(x, out);
  }

  Objective with_domain(Box domain) const;

 private:
  std::shared_ptr<const Landscape> landscape_;
  std::size_t dimension_;
  double smoothness_;
  Box domain_;
  std::optional<Point> target_;
  Family family_;
};

inline constexpr double kDefaultDomainHalfWidth = 5.0;

/// f(x) = (q/2)|x|^2 + A sum sin(B x_i); target is the origin, domain [-5, 5]^d.
Objective make_spiky(const SpikyParams& params);

/// f(x) = |x - center|^2 / 2 with L = 1 and target = center.
Objective make_quadratic(std::size_t dimension, const Point& center);

/// s * f for s > 0. Target and domain are preserved; smoothness scales by s.
Objective scaled(const Objective& objective, double factor);

/// Central differences (f(x + h e_i) - f(x - h e_i)) / 2h. Throws NumericalError naming the
/// coordinate when a non-finite value shows up.
Point finite_diff_gradient(const Objective& objective, PointView x, double h);

/// Descent-lemma check f(y) <= f(x) + <grad f(x), y - x> + (L/2)|y - x|^2 + 1e-12.
bool check_smoothness(const Objective& objective, PointView x, PointView y);

/// Same check against an explicitly supplied constant instead of the declared one.
bool check_smoothness(const Objective& objective, PointView x, PointView y, double smoothness);

}  // namespace smoothsgd
