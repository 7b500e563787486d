#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "smoothsgd/noise.hpp"
#include "smoothsgd/objectives.hpp"
#include "smoothsgd/optimizer.hpp"
#include "smoothsgd/point.hpp"

namespace smoothsgd {

/// Malformed or inconsistent experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ObjectiveSpec {
  std::string kind = "spiky";  // "spiky" | "quadratic"
  std::size_t dimension = 1;
  double quad = 1.0;
  double amp = 1.0;
  double freq = 10.0;
  Point center;  // quadratic only; empty means the origin
  Box domain;    // empty means [-5, 5]^d

  Objective build() const;
  bool operator==(const ObjectiveSpec&) const = default;
};

struct KernelSpec {
  NoiseKind kind = NoiseKind::uniform_ball;
  double radius = 0.0;

  NoiseKernel build(std::size_t dimension) const { return {kind, radius, dimension}; }
  bool operator==(const KernelSpec&) const = default;
};

struct StageSpec {
  double eta = 0.01;
  std::uint64_t steps = 1000;
  KernelSpec kernel;
  bool operator==(const StageSpec&) const = default;
};

/// Cell-centred grid with `points` cells per axis over [lo, hi].
struct GridSpec {
  double lo = -3.0;
  double hi = 3.0;
  std::size_t points = 30;
  bool operator==(const GridSpec&) const = default;
};

struct SmoothSpec {
  GridSpec grid{-3.0, 3.0, 100};
  double eta = 0.2;
  KernelSpec kernel{NoiseKind::uniform_ball, 1.0};
  bool operator==(const SmoothSpec&) const = default;
};

struct TheorySpec {
  double c = 1.0;
  double y0_dist2 = 9.0;
  std::uint64_t stay_steps = 500;
  bool operator==(const TheorySpec&) const = default;
};

/// Candidate smoothing widths are width_lo + k * width_step, k < width_count; the kernel radius
/// for width w is w / eta. eta <= 0 selects calibrated_eta(c_min, L).
struct CalibrationSpec {
  double c_min = 0.5;
  double eta = 0.0;
  NoiseKind kind = NoiseKind::uniform_ball;
  double width_lo = 0.001;
  double width_step = 0.001;
  std::size_t width_count = 500;
  std::vector<std::uint64_t> screen_samples{2'000, 20'000, 200'000};
  std::uint64_t samples = 2'000'000;
  bool operator==(const CalibrationSpec&) const = default;
};

/// A noise level is the smoothing width eta * r; the kernel radius is level / eta.
struct Figure3Stage {
  double eta = 0.01;
  double level = 0.3;
  std::uint64_t steps = 3000;
  double c = 1.0;
  bool operator==(const Figure3Stage&) const = default;
};

struct Figure3Spec {
  NoiseKind kind = NoiseKind::uniform_ball;
  double eta = 0.01;
  std::uint64_t steps = 3000;
  std::vector<double> levels{0.0, 0.1, 0.3, 1.0};
  std::vector<Figure3Stage> stages{{0.01, 0.3, 3000, 1.0},
                                   {0.005, 0.15, 4000, 1.0},
                                   {0.0025, 0.075, 8000, 1.0}};
  GridSpec curve{-5.0, 5.0, 201};
  std::uint64_t curve_samples = 10'000;
  bool operator==(const Figure3Spec&) const = default;
};

struct ExperimentConfig {
  ObjectiveSpec objective;
  std::vector<StageSpec> stages{StageSpec{}};
  std::uint64_t trials = 100;
  Box init_box;  // empty means [-5, 5]^d
  std::uint64_t seed = 42;
  std::string output = "out";
  GridSpec grid;
  double confidence = 0.99;
  std::uint64_t samples = 10'000;
  double c_min = 0.5;
  double cluster_tol = 0.05;
  std::size_t histogram_bins = 40;
  SmoothSpec smooth;
  TheorySpec theory;
  CalibrationSpec calibration;
  Figure3Spec figure3;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Parses a JSON document. Missing fields take their defaults; scalar bounds expand to every
/// coordinate. The result is validated.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical JSON with every field present; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& config);

/// Fills empty boxes and checks ranges and dimension agreement. Throws ConfigError.
void validate(ExperimentConfig& config);

StepSchedule build_schedule(const ExperimentConfig& config);
NoiseKernel level_kernel(NoiseKind kind, double level, double eta, std::size_t dimension);

}  // namespace smoothsgd
