#pragma once

#include <array>
#include <cstdint>

namespace smoothsgd {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers: as easy as 1, 2, 3",
/// SC'11). Matches the Random123 reference known-answer vectors.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

/// SplitMix64 finalizer, used only to derive sub-stream keys.
std::uint64_t splitmix64(std::uint64_t x);

/// Reproducible random stream identified by (seed, stream id).
///
/// Algorithm: philox4x32-10, stream format version 1. The 64-bit seed is the Philox key; the
/// 128-bit counter holds (block index, stream id). Each block yields two 64-bit words.
/// Identical (seed, stream id) pairs give identical sequences on every platform; distinct
/// stream ids address disjoint counter ranges of the same keyed permutation.
class RngStream {
 public:
  static constexpr const char* kAlgorithm = "philox4x32-10";
  static constexpr int kFormatVersion = 1;

  RngStream(std::uint64_t seed, std::uint64_t stream_id) : seed_(seed), stream_(stream_id) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_; }

  std::uint64_t next_u64();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller (deterministic, no cached second variate).
  double normal();

  /// Independent child stream; the child's key is SplitMix64-derived from (seed, stream id).
  RngStream substream(std::uint64_t index) const;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int available_ = 0;
};

}  // namespace smoothsgd
