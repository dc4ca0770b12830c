#pragma once

#include <cstdint>

namespace sbs {

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for an independent stream: mix64(mix64(mix64(master) ^ stream) ^ index).
/// Monte Carlo trial t of sweep point s uses derive_seed(master, s, t), so a
/// trial's randomness does not depend on how trials are scheduled.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index) {
  return mix64(mix64(mix64(master) ^ stream) ^ index);
}

}  // namespace sbs
