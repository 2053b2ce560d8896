#include "fdesim/rng.hpp"

namespace fdesim {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t KeyedRng::bits(Stream stream, std::uint64_t agent, std::uint64_t round) const noexcept {
  std::uint64_t h = mix64(seed_);
  h = mix64(h ^ static_cast<std::uint64_t>(stream));
  h = mix64(h ^ agent);
  h = mix64(h ^ round);
  return h;
}

double KeyedRng::uniform(Stream stream, std::uint64_t agent, std::uint64_t round) const noexcept {
  return static_cast<double>(bits(stream, agent, round) >> 11) * 0x1.0p-53;
}

}  // namespace fdesim
