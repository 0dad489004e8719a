#pragma once

#include <cstddef>
#include <cstdint>

namespace tribound {

/// SplitMix64 generator. The stream is fully pinned (state increment,
/// finalizer constants, 53-bit doubles, Box-Muller pairs) so every port of
/// the synthetic lab reproduces identical centroids, pools and triplets.
///
///   state += 0x9E3779B97F4A7C15
///   z = state
///   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///   return z ^ (z >> 31)
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();

  /// Uniform in [0, 1): top 53 bits of next() scaled by 2^-53.
  double uniform();

  /// Uniform integer in [0, bound) by rejection of the biased tail.
  std::uint64_t below(std::uint64_t bound);

  /// Standard normal. Box-Muller on (u1 = 1 - uniform(), u2 = uniform());
  /// returns r*cos(2 pi u2) first and caches r*sin(2 pi u2) for the next call.
  double normal();

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Independent child seed for stream `stream` of `seed`: the first output of
/// SplitMix64(seed ^ (stream * 0xD1B54A32D192ED03)).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace tribound
