#pragma once

#include <cstdint>
#include <random>

namespace cnsdist {

/// splitmix64 finalizer; also used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  return mix64(mix64(seed) ^ mix64(stream + 0x632be59bd9b4e019ULL));
}

/// Counter-based uniform draw in [0,1) keyed by (seed, a, b). Pure function,
/// so per-pair Bernoulli sampling does not depend on iteration order.
inline double keyed_uniform(std::uint64_t seed, std::uint64_t a, std::uint64_t b) noexcept {
  const std::uint64_t h = mix64(derive_seed(seed, a) ^ mix64(b * 0xd1b54a32d192ed03ULL + 1));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

/// Sequential stream for inherently ordered procedures (rewiring, splits).
using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t seed, std::uint64_t stream = 0) {
  return Engine(derive_seed(seed, stream));
}

}  // namespace cnsdist
