#pragma once

#include <cstdint>

namespace fdesim {

enum class Stream : std::uint64_t {
  InitNoise = 1,
  FollowerDecay = 2,
};

/// Counter-based generator: every draw is a hash of (seed, stream, agent,
/// round), so results never depend on the order agents are visited in.
class KeyedRng {
 public:
  explicit KeyedRng(std::uint64_t seed) noexcept : seed_(seed) {}

  std::uint64_t bits(Stream stream, std::uint64_t agent, std::uint64_t round) const noexcept;

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform(Stream stream, std::uint64_t agent, std::uint64_t round) const noexcept;

  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::uint64_t seed_;
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

}  // namespace fdesim
