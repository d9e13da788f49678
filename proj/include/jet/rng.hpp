#pragma once

#include <cstdint>

namespace jet {

// Small deterministic PRNG (splitmix64). Hand-rolled so that trained models
// are byte-identical across platforms and standard-library versions.
class Rng {
 public:
  explicit Rng(uint64_t seed, uint64_t stream = 0, uint64_t substream = 0) {
    state_ = mix(seed + 0x9E3779B97F4A7C15ULL);
    state_ = mix(state_ ^ mix(stream + 0xBF58476D1CE4E5B9ULL));
    state_ = mix(state_ ^ mix(substream + 0x94D049BB133111EBULL));
  }

  uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  // Uniform in [0, n). Multiply-shift reduction; bias is below 2^-32.
  uint32_t below(uint32_t n) {
    const uint64_t r = next() >> 32;
    return static_cast<uint32_t>((r * n) >> 32);
  }

  // Uniform in [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  static uint64_t mix(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  uint64_t state_;
};

// Stream tags so independent consumers of one user seed never overlap.
namespace rng_stream {
inline constexpr uint64_t kParamInit = 1;
inline constexpr uint64_t kStreamPrep = 2;
inline constexpr uint64_t kTraining = 3;
}  // namespace rng_stream

}  // namespace jet
