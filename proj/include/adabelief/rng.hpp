#pragma once

#include "adabelief/core.hpp"

#include <cstdint>

namespace adabelief {

// Counter-based SplitMix64 stream with a Box-Muller Gaussian transform.
//
// Draw k of a stream with seed s is mix64(s + (k + 1) * kGamma), i.e. the
// k-th output of a SplitMix64 generator started at state s. split(key)
// derives an independent child seed, so sub-streams can be created in any
// order. A Gaussian consumes two uniforms and uses only the cosine branch.
// Changing any of this changes every golden file.
class RngStream {
 public:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  explicit RngStream(std::uint64_t seed = 0) : seed_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t counter() const noexcept { return counter_; }

  static std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t next_u64() {
    ++counter_;
    return mix64(seed_ + counter_ * kGamma);
  }

  // Uniform on [0, 1) with 53 random bits.
  double next_uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double next_gaussian();

  RngStream split(std::uint64_t key) const { return RngStream(mix64(seed_ ^ mix64(key + kGamma))); }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

// d independent N(0, sigma^2) draws; sigma = 0 gives exact zeros without
// consuming the stream.
Vec gaussian_noise(RngStream& rng, Eigen::Index d, double sigma);

}  // namespace adabelief
