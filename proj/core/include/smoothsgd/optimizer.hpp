#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "smoothsgd/noise.hpp"
#include "smoothsgd/objectives.hpp"
#include "smoothsgd/point.hpp"
#include "smoothsgd/rng.hpp"

namespace smoothsgd {

/// One constant-step-size phase of a run.
struct Stage {
  double eta = 0.0;
  std::uint64_t steps = 0;
  NoiseKernel kernel = NoiseKernel::zero(1);
};

/// Ordered stages; the iterate carries over from one stage to the next (warm restart).
class StepSchedule {
 public:
  explicit StepSchedule(std::vector<Stage> stages);

  static StepSchedule constant(double eta, std::uint64_t steps, NoiseKernel kernel) {
    return StepSchedule({Stage{eta, steps, std::move(kernel)}});
  }

  const std::vector<Stage>& stages() const { return stages_; }
  std::uint64_t total_steps() const { return total_; }
  std::size_t dimension() const { return stages_.front().kernel.dimension(); }

 private:
  std::vector<Stage> stages_;
  std::uint64_t total_ = 0;
};

/// Iterates x_t, shadow points y_t = x_t - eta_t grad f(x_t) and the noise draws omega_t.
///
/// Record t describes x_t and the update x_t -> x_{t+1} = y_t - eta_t omega_t made with the
/// step size of stage `stage[t]`. The final record has no update: its noise is zero and its
/// step size is that of the last stage. Vectors are stored flat, `dimension` values per record.
struct Trajectory {
  std::size_t dimension = 0;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> noise;
  std::vector<double> value;
  std::vector<double> grad_norm;
  std::vector<double> noise_norm;
  std::vector<double> dist2;  // NaN when the objective has no target
  std::vector<double> eta;
  std::vector<std::uint32_t> stage;
  std::vector<std::uint8_t> out_of_box;
  bool diverged = false;

  std::size_t size() const { return value.size(); }
  bool empty() const { return value.empty(); }

  PointView x_at(std::size_t t) const { return {x.data() + t * dimension, dimension}; }
  PointView y_at(std::size_t t) const { return {y.data() + t * dimension, dimension}; }
  PointView noise_at(std::size_t t) const { return {noise.data() + t * dimension, dimension}; }
  PointView final_x() const { return x_at(size() - 1); }
  PointView final_y() const { return y_at(size() - 1); }
};

/// Iterates beyond this Euclidean norm are treated as divergent.
inline constexpr double kDivergenceNorm = 1e6;

/// SGD x_{t+1} = x_t - eta (grad f(x_t) + omega_t). Returns total_steps + 1 records unless the
/// run diverges (non-finite value or |x| > 1e6), in which case the trajectory stops at the last
/// valid iterate and `diverged` is set. Iterates leaving the domain box are flagged, not
/// projected.
Trajectory sgd_run(const Objective& objective, const StepSchedule& schedule, PointView x0,
                   RngStream& rng);

/// Plain gradient descent: sgd_run with the zero kernel.
Trajectory gd_run(const Objective& objective, double eta, std::uint64_t steps, PointView x0);

/// Max over constant-eta indices t of |y_{t+1} - (y_t - eta omega_t - eta grad f(y_t - eta omega_t))|.
/// Indices where the stage changes between t and t+1 are skipped. Zero for trajectories with
/// fewer than two records.
double shadow_check(const Trajectory& trajectory, const Objective& objective);

}  // namespace smoothsgd
