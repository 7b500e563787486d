#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "smoothsgd/noise.hpp"
#include "smoothsgd/rng.hpp"

using namespace smoothsgd;

using Block = std::array<std::uint32_t, 4>;

TEST(Philox, KnownAnswerVectors) {
  EXPECT_EQ(philox4x32_10({0, 0, 0, 0}, {0, 0}),
            (Block{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                          {0xffffffff, 0xffffffff}),
            (Block{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                          {0xa4093822, 0x299f31d0}),
            (Block{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(RngStream, PinnedAlgorithm) {
  EXPECT_STREQ(RngStream::kAlgorithm, "philox4x32-10");
  EXPECT_EQ(RngStream::kFormatVersion, 1);
}

TEST(RngStream, FirstWordsArePinned) {
  // Guards the documented stream layout: key = seed, counter = (block, stream id).
  RngStream rng(0, 0);
  const Block b = philox4x32_10({0, 0, 0, 0}, {0, 0});
  const std::uint64_t w0 = (std::uint64_t{b[1]} << 32) | b[0];
  const std::uint64_t w1 = (std::uint64_t{b[3]} << 32) | b[2];
  EXPECT_EQ(rng.next_u64(), w0);
  EXPECT_EQ(rng.next_u64(), w1);
}

TEST(RngStream, SameIdsSameSequence) {
  RngStream a(99, 5), b(99, 5);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.next_u64(), b.next_u64());
  RngStream c = RngStream(99, 5).substream(3), d = RngStream(99, 5).substream(3);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(c.next_u64(), d.next_u64());
}

TEST(RngStream, DistinctStreamsDiffer) {
  std::set<std::uint64_t> firsts;
  for (std::uint64_t s = 0; s < 100; ++s) firsts.insert(RngStream(1, s).next_u64());
  for (std::uint64_t s = 0; s < 100; ++s) firsts.insert(RngStream(1, 0).substream(s).next_u64());
  EXPECT_EQ(firsts.size(), 200u);
}

TEST(RngStream, DistinctStreamsUncorrelated) {
  const int n = 100'000;
  for (std::uint64_t s = 1; s < 5; ++s) {
    RngStream a(7, 0), b(7, s);
    double sab = 0, sa = 0, sb = 0, saa = 0, sbb = 0;
    for (int i = 0; i < n; ++i) {
      const double u = a.uniform(), v = b.uniform();
      sab += u * v, sa += u, sb += v, saa += u * u, sbb += v * v;
    }
    const double cov = sab / n - (sa / n) * (sb / n);
    const double corr = cov / std::sqrt((saa / n - sa * sa / n / n) * (sbb / n - sb * sb / n / n));
    EXPECT_LT(std::abs(corr), 5.0 / std::sqrt(n));
  }
}

TEST(RngStream, UniformAndNormalMoments) {
  RngStream rng(123, 0);
  const int n = 200'000;
  double s = 0, s2 = 0, z = 0, z2 = 0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    s += u, s2 += u * u;
    const double g = rng.normal();
    z += g, z2 += g * g;
  }
  EXPECT_NEAR(s / n, 0.5, 0.005);
  EXPECT_NEAR(s2 / n - (s / n) * (s / n), 1.0 / 12.0, 0.002);
  EXPECT_NEAR(z / n, 0.0, 0.01);
  EXPECT_NEAR(z2 / n, 1.0, 0.01);
}

TEST(NoiseKind, ParsesNames) {
  for (NoiseKind k : {NoiseKind::zero, NoiseKind::uniform_cube, NoiseKind::uniform_ball}) {
    EXPECT_EQ(parse_noise_kind(to_string(k)), k);
  }
  EXPECT_FALSE(parse_noise_kind("gaussian").has_value());
}

TEST(NoiseKernel, RejectsBadParameters) {
  EXPECT_THROW(NoiseKernel(NoiseKind::uniform_ball, -1.0, 1), InvalidArgument);
  EXPECT_THROW(NoiseKernel(NoiseKind::uniform_ball, 1.0, 0), InvalidArgument);
  EXPECT_THROW(NoiseKernel(NoiseKind::uniform_ball, INFINITY, 1), InvalidArgument);
  RngStream rng(0, 0);
  EXPECT_THROW(NoiseKernel(NoiseKind::uniform_ball, 1.0, 2).sample(Point{0.0}, rng),
               InvalidArgument);
}

TEST(NoiseKernel, ZeroKernelIsZero) {
  RngStream rng(0, 0);
  const NoiseKernel k = NoiseKernel::zero(3);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(k.sample(Point{1, 2, 3}, rng), (Point{0, 0, 0}));
  EXPECT_TRUE(NoiseKernel(NoiseKind::uniform_cube, 0.0, 2).degenerate());
}

TEST(NoiseKernel, NormBoundNeverViolated) {
  for (NoiseKind kind : {NoiseKind::uniform_cube, NoiseKind::uniform_ball}) {
    for (std::size_t d : {1u, 2u, 3u, 5u}) {
      const double r = 0.3;
      const NoiseKernel k(kind, r, d);
      RngStream rng(5, d);
      Point w(d);
      const int n = d == 1 ? 1'000'000 : 250'000;
      for (int i = 0; i < n; ++i) {
        k.sample_unchecked(rng, w);
        ASSERT_LE(norm(w), r) << to_string(kind) << " d=" << d << " sample " << i;
      }
    }
  }
}

TEST(NoiseKernel, ZeroMeanAndBallBound) {
  for (NoiseKind kind : {NoiseKind::uniform_cube, NoiseKind::uniform_ball}) {
    for (std::size_t d : {1u, 2u, 4u}) {
      const double r = 0.3;
      const NoiseKernel k(kind, r, d);
      RngStream rng(17, d);
      const int n = 100'000;
      Point mean(d, 0.0), w(d);
      double max_norm = 0;
      for (int i = 0; i < n; ++i) {
        k.sample_unchecked(rng, w);
        max_norm = std::max(max_norm, norm(w));
        for (std::size_t j = 0; j < d; ++j) mean[j] += w[j] / n;
      }
      EXPECT_LE(max_norm, r);
      EXPECT_LE(norm(mean), 4 * r / std::sqrt(n));
    }
  }
}

TEST(NoiseKernel, IntervalVariance) {
  const NoiseKernel k(NoiseKind::uniform_ball, 0.3, 1);
  RngStream rng(8, 0);
  const int n = 100'000;
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    const double w = k.sample(Point{0.0}, rng)[0];
    s += w, s2 += w * w;
  }
  EXPECT_NEAR(s2 / n - (s / n) * (s / n), 0.03, 0.002);
}

TEST(SecondMoment, ClosedForms) {
  EXPECT_EQ(second_moment(NoiseKernel::zero(2)), 0.0);
  EXPECT_DOUBLE_EQ(second_moment(NoiseKernel(NoiseKind::uniform_ball, 1.0, 1)), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(second_moment(NoiseKernel(NoiseKind::uniform_ball, 1.0, 2)), 0.5);
  EXPECT_DOUBLE_EQ(second_moment(NoiseKernel(NoiseKind::uniform_cube, 2.0, 4)), 4.0 / 3.0);
}

TEST(SecondMoment, MatchesSampling) {
  for (NoiseKind kind : {NoiseKind::uniform_cube, NoiseKind::uniform_ball}) {
    for (std::size_t d : {1u, 2u, 3u, 6u}) {
      const NoiseKernel k(kind, 1.5, d);
      RngStream rng(31, d);
      const int n = 200'000;
      Point w(d);
      double s = 0;
      for (int i = 0; i < n; ++i) {
        k.sample_unchecked(rng, w);
        s += norm2(w);
      }
      EXPECT_NEAR(s / n, second_moment(k), 0.01 * second_moment(k)) << to_string(kind) << d;
    }
  }
}

TEST(NoiseKernel, BallFillsVolumeUniformly) {
  // Fraction of samples inside half the radius is 2^-d for a uniform ball.
  for (std::size_t d : {2u, 3u, 5u}) {
    const NoiseKernel k(NoiseKind::uniform_ball, 1.0, d);
    RngStream rng(77, d);
    const int n = 100'000;
    Point w(d);
    int inner = 0;
    for (int i = 0; i < n; ++i) {
      k.sample_unchecked(rng, w);
      inner += norm(w) < 0.5;
    }
    const double p = std::pow(0.5, static_cast<double>(d));
    EXPECT_NEAR(static_cast<double>(inner) / n, p, 5 * std::sqrt(p * (1 - p) / n));
  }
}
