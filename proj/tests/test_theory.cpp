#include <gtest/gtest.h>

#include <cmath>

#include "smoothsgd/optimizer.hpp"
#include "smoothsgd/theory.hpp"

using namespace smoothsgd;

TEST(Constants, WorkedExample) {
  const TheoremConstants k = constants(1.0, 0.1, 1.0, 1.0, 9.0, 500);
  EXPECT_NEAR(k.lambda, 0.19, 1e-15);
  EXPECT_NEAR(k.b, 0.0121, 1e-16);
  EXPECT_NEAR(k.stay_radius2, 0.242 / 0.19, 1e-12);
  EXPECT_DOUBLE_EQ(k.zeta, 1125.0);
  EXPECT_DOUBLE_EQ(k.mu, 42.0 * std::sqrt(std::log(1125.0)));
  EXPECT_DOUBLE_EQ(k.delta2, k.mu * k.mu * k.b / k.lambda);
  ASSERT_TRUE(k.t1_min.has_value());
  EXPECT_EQ(*k.t1_min, static_cast<std::uint64_t>(std::ceil(std::log(0.19 * 9.0 / 0.0121) / 0.19)));
  EXPECT_EQ(*k.t1_min, 27u);
  EXPECT_DOUBLE_EQ(k.eta_bound, 0.5);
  EXPECT_TRUE(k.eta_valid);
}

TEST(Constants, ZeroNoise) {
  const TheoremConstants k = constants(1.0, 0.1, 1.0, 0.0, 4.0, 100);
  EXPECT_EQ(k.b, 0.0);
  EXPECT_EQ(k.stay_radius2, 0.0);
  EXPECT_EQ(k.delta2, 0.0);
  EXPECT_FALSE(k.t1_min.has_value());
  EXPECT_EQ(constants(1.0, 0.1, 1.0, 0.0, 0.0, 100).t1_min, 0u);
}

TEST(Constants, StepSizeValidity) {
  EXPECT_FALSE(constants(1.0, 0.6, 1.0, 1.0, 1.0, 10).eta_valid);
  EXPECT_FALSE(constants(1.0, 0.5, 1.0, 1.0, 1.0, 10).eta_valid);
  EXPECT_TRUE(constants(1.0, 0.49, 1.0, 1.0, 1.0, 10).eta_valid);
  EXPECT_DOUBLE_EQ(constants(0.5, 1e-5, 101.0, 1.0, 1.0, 10).eta_bound, 0.5 / (101.0 * 101.0));
}

TEST(Constants, RejectsInvalidInputs) {
  EXPECT_THROW(constants(0.0, 0.1, 1, 1, 1, 1), InvalidArgument);
  EXPECT_THROW(constants(1.0, 0.0, 1, 1, 1, 1), InvalidArgument);
  EXPECT_THROW(constants(1.0, 0.1, -1, 1, 1, 1), InvalidArgument);
  EXPECT_THROW(constants(1.0, 0.1, 1, -1, 1, 1), InvalidArgument);
  EXPECT_THROW(constants(1.0, 0.1, 1, 1, -1, 1), InvalidArgument);
}

TEST(Constants, HittingTimeClampsInsideRadius) {
  // lambda * y0 / b <= 1: already inside, no waiting.
  const TheoremConstants k = constants(1.0, 0.1, 1.0, 1.0, 0.05, 10);
  EXPECT_LE(k.lambda * 0.05 / k.b, 1.0);
  EXPECT_EQ(k.t1_min, 0u);
}

TEST(Constants, ExcursionMultiplierFloor) {
  EXPECT_EQ(constants(1.0, 0.1, 1.0, 1.0, 1.0, 0).mu, 8.0);
  EXPECT_EQ(constants(1.0, 0.1, 1.0, 1.0, 1.0, 1).mu, 42.0 * std::sqrt(std::log(2.25)));
  EXPECT_EQ(constants(1.0, 0.1, 1.0, 1.0, 1.0, 1).zeta, 2.25);
}

TEST(Constants, UnreachableWhenNotContracting) {
  const TheoremConstants k = constants(1.0, 2.1, 1.0, 0.1, 1.0, 10);
  EXPECT_LE(k.lambda, 0.0);
  EXPECT_FALSE(k.t1_min.has_value());
  EXPECT_FALSE(k.eta_valid);
}

TEST(Constants, InvariantsOverParameterGrid) {
  for (double c : {0.1, 0.5, 1.0, 2.0}) {
    for (double L : {0.5, 1.0, 10.0, 101.0}) {
      for (double frac : {0.01, 0.3, 0.9}) {
        const double eta = frac * std::min({1 / (2 * L), c / (L * L), 1 / (2 * c)});
        for (double r : {0.0, 0.5, 3.0}) {
          for (std::uint64_t T2 : {0u, 1u, 100u, 5000u}) {
            const TheoremConstants k = constants(c, eta, L, r, 9.0, T2);
            EXPECT_TRUE(k.eta_valid);
            EXPECT_GT(k.lambda, eta * c);
            EXPECT_GE(k.mu, 8.0);
            EXPECT_GE(k.delta2, k.stay_radius2);
            const TheoremConstants again = constants(c, eta, L, r, 9.0, T2);
            EXPECT_EQ(again.lambda, k.lambda);
            EXPECT_EQ(again.b, k.b);
            EXPECT_EQ(again.t1_min, k.t1_min);
            EXPECT_EQ(again.delta2, k.delta2);
          }
        }
      }
    }
  }
}

TEST(Constants, StayRadiusMonotonicity) {
  const double L = 2.0;
  for (double c : {0.5, 1.0}) {
    const double cap = std::min({1 / (2 * L), c / (L * L), 1 / (2 * c)});
    double prev = 0.0;
    for (double eta = cap / 20; eta < cap; eta += cap / 20) {
      const double s = constants(c, eta, L, 1.0, 1.0, 10).stay_radius2;
      EXPECT_GT(s, prev) << "eta";
      prev = s;
    }
    prev = 0.0;
    for (double r = 0.1; r < 5.0; r += 0.1) {
      const double s = constants(c, cap / 2, L, r, 1.0, 10).stay_radius2;
      EXPECT_GT(s, prev) << "r";
      prev = s;
    }
  }
  double prev = INFINITY;
  for (double c = 0.2; c < 1.0; c += 0.05) {
    const double s = constants(c, 0.01, L, 1.0, 1.0, 10).stay_radius2;
    EXPECT_LT(s, prev) << "c";
    prev = s;
  }
}

TEST(Constants, SecondStageShrinks) {
  for (double c : {0.2, 0.5, 1.0}) {
    for (double eta : {0.01, 0.05}) {
      const TheoremConstants first = constants(c, eta, 2.0, 1.0, 9.0, 100);
      const TheoremConstants second = constants(1.5 * c, eta / 2, 2.0, 1.0, 9.0, 100);
      EXPECT_LT(second.stay_radius2, first.stay_radius2);
    }
  }
}

TEST(DivergenceThreshold, QuadraticEqualityCase) {
  EXPECT_DOUBLE_EQ(divergence_threshold(1.0, 1.0, 1.0), 2.0);
  EXPECT_THROW(divergence_threshold(1.0, 1.0, 0.0), InvalidArgument);
  const Objective f = make_quadratic(1, {0.0});
  for (double eta : {2.1, 1.9}) {
    const Trajectory t = gd_run(f, eta, 20, Point{1.0});
    for (std::size_t k = 0; k + 1 < t.size(); ++k) {
      const double ratio = std::abs(t.x_at(k + 1)[0]) / std::abs(t.x_at(k)[0]);
      EXPECT_NEAR(ratio, std::abs(1 - eta), 1e-12);
    }
  }
}

TEST(Drift, NoiselessQuadraticIsExact) {
  const Objective f = make_quadratic(2, {0.0, 0.0});
  RngStream rng(1, 0);
  for (double eta : {0.05, 0.3, 0.9}) {
    const Point y{1.5, -0.5};
    const DriftReport d = drift_check(f, NoiseKernel::zero(2), eta, 1.0, 1.0, y, Point{0.0, 0.0}, 2, rng);
    EXPECT_NEAR(d.lambda, 2 * eta - eta * eta, 1e-15);
    EXPECT_EQ(d.b, 0.0);
    EXPECT_NEAR(d.estimate, (1 - eta) * (1 - eta) * norm2(y), 1e-12);
    EXPECT_NEAR(d.estimate, d.bound, 1e-12);
    EXPECT_TRUE(d.pass);
  }
}

TEST(Drift, AtTargetOnlyNoiseRemains) {
  const Objective f = make_quadratic(1, {0.0});
  RngStream rng(2, 0);
  const DriftReport d = drift_check(f, NoiseKernel(NoiseKind::uniform_ball, 1.0, 1), 0.1, 1.0, 1.0,
                                    Point{0.0}, Point{0.0}, 10'000, rng);
  EXPECT_LE(d.estimate, d.b + d.ci_halfwidth);
  EXPECT_TRUE(d.pass);
  EXPECT_THROW(drift_check(f, NoiseKernel::zero(1), 0.1, 1.0, 1.0, Point{0.0}, Point{0.0}, 1, rng),
               InvalidArgument);
}

TEST(Drift, SmoothedSpikyLandscapeContracts) {
  const Objective f = make_spiky({});
  const double eta = 4e-5, r = M_PI / (10.0 * eta);
  const NoiseKernel k(NoiseKind::uniform_ball, r, 1);
  RngStream rng(3, 0);
  int passed = 0;
  for (int i = 0; i < 20; ++i) {
    const Point y{rng.uniform(-3, 3)};
    passed += drift_check(f, k, eta, 0.5, f.smoothness(), y, Point{0.0}, 5000, rng).pass;
  }
  EXPECT_GE(passed, 19);
}

TEST(Stay, NoiselessQuadraticAlwaysStays) {
  const Objective f = make_quadratic(1, {0.0});
  std::vector<Trajectory> ensemble;
  for (double x0 : {-3.0, -1.0, 0.5, 2.0}) ensemble.push_back(gd_run(f, 1.0, 30, Point{x0}));
  const TheoremConstants k = constants(1.0, 1.0, 1.0, 0.0, 9.0, 20);
  const StayReport s = stay_validate(ensemble, k, Point{0.0}, 1);
  EXPECT_EQ(s.hit_fraction, 1.0);
  EXPECT_EQ(s.stay_fraction, 1.0);
  EXPECT_EQ(s.both_fraction, 1.0);
  EXPECT_EQ(s.trials, 4u);
  // Without an explicit start the hitting time is undefined here.
  EXPECT_THROW(stay_validate(ensemble, k, Point{0.0}), InvalidArgument);
}

TEST(Stay, ExpandingStepNeverHits) {
  const Objective f = make_quadratic(1, {0.0});
  std::vector<Trajectory> ensemble;
  for (std::uint64_t s = 0; s < 20; ++s) {
    RngStream rng(s, 0);
    ensemble.push_back(sgd_run(
        f, StepSchedule::constant(2.1, 100, NoiseKernel(NoiseKind::uniform_ball, 0.1, 1)),
        Point{1.0}, rng));
  }
  const TheoremConstants k = constants(1.0, 2.1, 1.0, 0.1, 1.0, 50);
  const StayReport s = stay_validate(ensemble, k, Point{0.0}, 50);
  EXPECT_EQ(s.hit_fraction, 0.0);
}

TEST(Stay, TooShortTrajectory) {
  const Objective f = make_quadratic(1, {0.0});
  const std::vector<Trajectory> ensemble{gd_run(f, 0.5, 10, Point{1.0})};
  const TheoremConstants k = constants(1.0, 0.5, 1.0, 0.1, 1.0, 50);
  EXPECT_THROW(stay_validate(ensemble, k, Point{0.0}, 0), InvalidArgument);
}
