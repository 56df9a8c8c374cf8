#pragma once

#include <cstdint>
#include <limits>

namespace mnlmatch {

// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Seed for item `id` of a run seeded with `seed`.
constexpr std::uint64_t mix64(std::uint64_t seed, std::uint64_t id) noexcept {
  return mix64(seed ^ mix64(id + 0x9e3779b97f4a7c15ULL));
}

// Counter-based SplitMix64 generator: the k-th output is mix64(key + k*gamma),
// so a (key, counter) pair fully determines the stream on every platform.
// Satisfies UniformRandomBitGenerator, but callers should prefer uniform01()
// over <random> distributions, whose algorithms are implementation-defined.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  constexpr explicit SplitMix64(std::uint64_t seed) noexcept : key_(seed) {}

  // Independent stream `stream_id` derived from a root seed.
  static constexpr SplitMix64 stream(std::uint64_t seed,
                                     std::uint64_t stream_id) noexcept {
    return SplitMix64(mix64(seed, stream_id));
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  constexpr result_type operator()() noexcept {
    ++counter_;
    return mix64(key_ + counter_ * kGamma);
  }

  // Uniform double in [0, 1) with 53 random bits.
  constexpr double uniform01() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  constexpr std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace mnlmatch
