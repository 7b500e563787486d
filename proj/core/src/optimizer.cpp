#include "smoothsgd/optimizer.hpp"

#include <cmath>
#include <limits>
#include <utility>

namespace smoothsgd {

StepSchedule::StepSchedule(std::vector<Stage> stages) : stages_(std::move(stages)) {
  require(!stages_.empty(), "StepSchedule: at least one stage required");
  const std::size_t d = stages_.front().kernel.dimension();
  for (const auto& s : stages_) {
    require(s.eta > 0.0 && std::isfinite(s.eta), "StepSchedule: every eta must be finite and > 0");
    require(s.steps >= 1, "StepSchedule: every stage needs at least one step");
    require_dimension(d, s.kernel.dimension(), "StepSchedule stage kernel");
    total_ += s.steps;
  }
}

namespace {

void reserve(Trajectory& traj, std::size_t records) {
  const std::size_t d = traj.dimension;
  traj.x.reserve(records * d);
  traj.y.reserve(records * d);
  traj.noise.reserve(records * d);
  traj.value.reserve(records);
  traj.grad_norm.reserve(records);
  traj.noise_norm.reserve(records);
  traj.dist2.reserve(records);
  traj.eta.reserve(records);
  traj.stage.reserve(records);
  traj.out_of_box.reserve(records);
}

}  // namespace

Trajectory sgd_run(const Objective& objective, const StepSchedule& schedule, PointView x0,
                   RngStream& rng) {
  const std::size_t d = objective.dimension();
  require_dimension(d, x0.size(), "sgd_run x0");
  require_dimension(d, schedule.dimension(), "sgd_run schedule");
  require(all_finite(x0), "sgd_run: x0 must be finite");

  Trajectory traj;
  traj.dimension = d;
  reserve(traj, schedule.total_steps() + 1);

  const auto& target = objective.target();
  const auto& box = objective.domain();
  Point x(x0.begin(), x0.end());
  Point g(d), y(d), omega(d), next(d);

  // Records x (already validated), its shadow point under `eta`, and the noise used to leave it.
  auto record = [&](double eta, std::uint32_t stage, double fx, PointView w) {
    traj.x.insert(traj.x.end(), x.begin(), x.end());
    traj.y.insert(traj.y.end(), y.begin(), y.end());
    traj.noise.insert(traj.noise.end(), w.begin(), w.end());
    traj.value.push_back(fx);
    traj.grad_norm.push_back(norm(g));
    traj.noise_norm.push_back(norm(w));
    traj.dist2.push_back(target ? smoothsgd::dist2(x, *target)
                                : std::numeric_limits<double>::quiet_NaN());
    traj.eta.push_back(eta);
    traj.stage.push_back(stage);
    traj.out_of_box.push_back(box.contains(x) ? 0 : 1);
  };

  auto evaluate = [&](double eta) -> std::optional<double> {
    const double fx = objective.value_unchecked(x);
    objective.gradient_unchecked(x, g);
    if (!std::isfinite(fx) || !all_finite(g)) return std::nullopt;
    for (std::size_t i = 0; i < d; ++i) y[i] = x[i] - eta * g[i];
    return fx;
  };

  const auto& stages = schedule.stages();
  for (std::uint32_t s = 0; s < stages.size(); ++s) {
    const Stage& stage = stages[s];
    for (std::uint64_t k = 0; k < stage.steps; ++k) {
      const auto fx = evaluate(stage.eta);
      if (!fx) {
        traj.diverged = true;
        return traj;
      }
      stage.kernel.sample_unchecked(rng, omega);
      for (std::size_t i = 0; i < d; ++i) next[i] = y[i] - stage.eta * omega[i];
      record(stage.eta, s, *fx, omega);
      if (!all_finite(next) || norm(next) > kDivergenceNorm) {
        traj.diverged = true;
        return traj;
      }
      x.swap(next);
    }
  }

  const double last_eta = stages.back().eta;
  const auto fx = evaluate(last_eta);
  if (!fx) {
    traj.diverged = true;
    return traj;
  }
  std::fill(omega.begin(), omega.end(), 0.0);
  record(last_eta, static_cast<std::uint32_t>(stages.size() - 1), *fx, omega);
  return traj;
}

Trajectory gd_run(const Objective& objective, double eta, std::uint64_t steps, PointView x0) {
  RngStream unused(0, 0);
  return sgd_run(objective,
                 StepSchedule::constant(eta, steps, NoiseKernel::zero(objective.dimension())), x0,
                 unused);
}

double shadow_check(const Trajectory& trajectory, const Objective& objective) {
  const std::size_t d = trajectory.dimension;
  require_dimension(objective.dimension(), d, "shadow_check");
  double worst = 0.0;
  Point probe(d), g(d);
  for (std::size_t t = 0; t + 1 < trajectory.size(); ++t) {
    if (trajectory.stage[t] != trajectory.stage[t + 1]) continue;
    const double eta = trajectory.eta[t];
    const PointView yt = trajectory.y_at(t);
    const PointView wt = trajectory.noise_at(t);
    const PointView yn = trajectory.y_at(t + 1);
    for (std::size_t i = 0; i < d; ++i) probe[i] = yt[i] - eta * wt[i];
    objective.gradient_unchecked(probe, g);
    double r2 = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const double diff = yn[i] - (yt[i] - eta * wt[i] - eta * g[i]);
      r2 += diff * diff;
    }
    worst = std::max(worst, std::sqrt(r2));
  }
  return worst;
}

}  // namespace smoothsgd
