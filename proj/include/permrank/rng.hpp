#pragma once

#include <cstdint>

namespace permrank {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Counter-based generator: every draw is a pure function of
/// (seed, stream, counter), so per-entry samples do not depend on the order in
/// which entries or trials are visited.
class CounterRng {
 public:
  explicit constexpr CounterRng(std::uint64_t seed) : seed_(seed) {}

  constexpr std::uint64_t seed() const { return seed_; }

  constexpr std::uint64_t bits(std::uint64_t stream, std::uint64_t counter) const {
    const std::uint64_t key = mix64(seed_ ^ mix64(stream + 0x632BE59BD9B4E019ULL));
    return mix64(key + counter * 0xD1B54A32D192ED03ULL);
  }

  /// Uniform in [0, 1) with 53 random bits.
  constexpr double uniform(std::uint64_t stream, std::uint64_t counter) const {
    return static_cast<double>(bits(stream, counter) >> 11) * 0x1.0p-53;
  }

  /// Independent child generator, e.g. for trial i of an experiment.
  constexpr CounterRng derive(std::uint64_t key) const {
    return CounterRng(bits(0xA5A5A5A5A5A5A5A5ULL, key));
  }

 private:
  std::uint64_t seed_;
};

/// Stream identifiers. Sampling the observations and the noise matrix from
/// the same seed uses the same stream, which couples the two draws.
namespace streams {
inline constexpr std::uint64_t kObservation = 1;
inline constexpr std::uint64_t kGenerator = 2;
inline constexpr std::uint64_t kPermutation = 3;
inline constexpr std::uint64_t kPowerIteration = 4;
}  // namespace streams

}  // namespace permrank
