#include "smoothsgd/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace smoothsgd {

void Landscape::gradient_range(PointView /*center*/, double radius, double smoothness,
                               std::span<double> out) const {
  std::fill(out.begin(), out.end(), 2.0 * smoothness * radius);
}

namespace {

class SpikyLandscape final : public Landscape {
 public:
  explicit SpikyLandscape(SpikyParams p) : p_(p) {}

  double value(PointView x) const override {
    double quad = 0.0;
    double spikes = 0.0;
    for (double xi : x) {
      quad += xi * xi;
      spikes += std::sin(p_.freq * xi);
    }
    return 0.5 * p_.quad * quad + p_.amp * spikes;
  }

  void gradient(PointView x, std::span<double> out) const override {
    const double ab = p_.amp * p_.freq;
    for (std::size_t i = 0; i < x.size(); ++i) {
      out[i] = p_.quad * x[i] + ab * std::cos(p_.freq * x[i]);
    }
  }

  // Coordinate-separable: q z_i varies by 2 q rho, A B cos(B z_i) by at most
  // min(2 A B, 2 A B^2 rho).
  void gradient_range(PointView /*center*/, double radius, double /*smoothness*/,
                      std::span<double> out) const override {
    const double ab = p_.amp * p_.freq;
    const double r = 2.0 * p_.quad * radius + std::min(2.0 * ab, 2.0 * ab * p_.freq * radius);
    std::fill(out.begin(), out.end(), r);
  }

 private:
  SpikyParams p_;
};

class QuadraticLandscape final : public Landscape {
 public:
  explicit QuadraticLandscape(Point center) : center_(std::move(center)) {}

  double value(PointView x) const override { return 0.5 * dist2(x, center_); }

  void gradient(PointView x, std::span<double> out) const override {
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] - center_[i];
  }

  void gradient_range(PointView /*center*/, double radius, double /*smoothness*/,
                      std::span<double> out) const override {
    std::fill(out.begin(), out.end(), 2.0 * radius);
  }

 private:
  Point center_;
};

class ScaledLandscape final : public Landscape {
 public:
  ScaledLandscape(Objective inner, double factor) : inner_(std::move(inner)), factor_(factor) {}

  double value(PointView x) const override { return factor_ * inner_.value_unchecked(x); }

  void gradient(PointView x, std::span<double> out) const override {
    inner_.gradient_unchecked(x, out);
    for (double& g : out) g *= factor_;
  }

  void gradient_range(PointView center, double radius, double /*smoothness*/,
                      std::span<double> out) const override {
    inner_.gradient_range(center, radius, out);
    for (double& g : out) g *= factor_;
  }

 private:
  Objective inner_;
  double factor_;
};

}  // namespace

Objective::Objective(std::shared_ptr<const Landscape> landscape, std::size_t dimension,
                     double smoothness, Box domain, std::optional<Point> target,
                     Family family)
    : landscape_(std::move(landscape)),
      dimension_(dimension),
      smoothness_(smoothness),
      domain_(std::move(domain)),
      target_(std::move(target)),
      family_(std::move(family)) {
  require(landscape_ != nullptr, "Objective: null landscape");
  require(dimension_ >= 1, "Objective: dimension must be >= 1");
  require(smoothness_ >= 0.0 && std::isfinite(smoothness_),
          "Objective: smoothness must be finite and >= 0");
  require_dimension(dimension_, domain_.lo.size(), "Objective domain lo");
  require_dimension(dimension_, domain_.hi.size(), "Objective domain hi");
  if (target_) require_dimension(dimension_, target_->size(), "Objective target");
}

double Objective::value(PointView x) const {
  require_dimension(dimension_, x.size(), "Objective::value");
  require(all_finite(x), "Objective::value: non-finite argument");
  return landscape_->value(x);
}

Point Objective::gradient(PointView x) const {
  Point g(dimension_);
  gradient(x, g);
  return g;
}

void Objective::gradient(PointView x, std::span<double> out) const {
  require_dimension(dimension_, x.size(), "Objective::gradient");
  require(all_finite(x), "Objective::gradient: non-finite argument");
  require_dimension(dimension_, out.size(), "Objective::gradient output");
  landscape_->gradient(x, out);
}

void Objective::gradient_range(PointView center, double radius, std::span<double> out) const {
  require_dimension(dimension_, center.size(), "Objective::gradient_range");
  require_dimension(dimension_, out.size(), "Objective::gradient_range output");
  landscape_->gradient_range(center, radius, smoothness_, out);
}

Objective Objective::with_domain(Box domain) const {
  return Objective(landscape_, dimension_, smoothness_, std::move(domain), target_, family_);
}

Objective make_spiky(const SpikyParams& params) {
  require(params.quad > 0.0, "make_spiky: quad must be > 0");
  require(params.freq > 0.0, "make_spiky: freq must be > 0");
  require(params.amp >= 0.0, "make_spiky: amp must be >= 0");
  require(params.dimension >= 1, "make_spiky: dimension must be >= 1");
  const std::size_t d = params.dimension;
  return Objective(std::make_shared<SpikyLandscape>(params), d, params.smoothness(),
                   Box::cube(d, -kDefaultDomainHalfWidth, kDefaultDomainHalfWidth),
                   Point(d, 0.0), params);
}

Objective make_quadratic(std::size_t dimension, const Point& center) {
  require(dimension >= 1, "make_quadratic: dimension must be >= 1");
  require_dimension(dimension, center.size(), "make_quadratic center");
  require(all_finite(center), "make_quadratic: center must be finite");
  return Objective(std::make_shared<QuadraticLandscape>(center), dimension, 1.0,
                   Box::cube(dimension, -kDefaultDomainHalfWidth, kDefaultDomainHalfWidth),
                   center, QuadraticParams{center});
}

Objective scaled(const Objective& objective, double factor) {
  require(factor > 0.0 && std::isfinite(factor), "scaled: factor must be finite and > 0");
  return Objective(std::make_shared<ScaledLandscape>(objective, factor), objective.dimension(),
                   factor * objective.smoothness(), objective.domain(), objective.target());
}

Point finite_diff_gradient(const Objective& objective, PointView x, double h) {
  require(h > 0.0, "finite_diff_gradient: h must be > 0");
  require_dimension(objective.dimension(), x.size(), "finite_diff_gradient");
  Point probe(x.begin(), x.end());
  Point out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double fp = objective.value_unchecked(probe);
    probe[i] = x[i] - h;
    const double fm = objective.value_unchecked(probe);
    probe[i] = x[i];
    if (!std::isfinite(fp) || !std::isfinite(fm)) {
      throw NumericalError("finite_diff_gradient: non-finite value at coordinate " +
                           std::to_string(i));
    }
    out[i] = (fp - fm) / (2.0 * h);
  }
  return out;
}

bool check_smoothness(const Objective& objective, PointView x, PointView y) {
  return check_smoothness(objective, x, y, objective.smoothness());
}

bool check_smoothness(const Objective& objective, PointView x, PointView y, double smoothness) {
  require_dimension(objective.dimension(), y.size(), "check_smoothness");
  const Point g = objective.gradient(x);
  double inner = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) inner += g[i] * (y[i] - x[i]);
  const double bound =
      objective.value(x) + inner + 0.5 * smoothness * dist2(x, y) + 1e-12;
  return objective.value(y) <= bound;
}

}  // namespace smoothsgd
