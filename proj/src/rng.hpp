#pragma once

#include <cstdint>

namespace kle {

/// Splittable counter-style RNG. Each (seed, stream) pair yields an
/// independent SplitMix64 sequence, so stream k can be generated without
/// touching streams 0..k-1; sampling order never affects the draws.
/// Standard normals come from Box-Muller applied to consecutive uniforms.
class GaussianStream {
 public:
  GaussianStream(std::uint64_t seed, std::uint64_t stream);

  /// Next uniform deviate in [0, 1).
  double next_uniform();

  /// Next standard normal deviate.
  double next_normal();

 private:
  std::uint64_t next_u64();

  std::uint64_t state_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace kle
