#pragma once

// Seed derivation and counter-based uniforms.
//
// Each pipeline stage draws from its own substream derived from the run seed,
// so changing one stage never perturbs the draws of another. Per-event
// decisions (modulator thinning) are keyed by (seed, event id) so that they do
// not depend on processing order.

#include <cstdint>
#include <random>
#include <string_view>

namespace qmwp::rng {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix64(mix64(seed) ^ mix64(stream + 0x632be59bd9b4e019ULL));
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char ch : tag) h = (h ^ static_cast<unsigned char>(ch)) * 0x100000001b3ULL;
  return derive_seed(seed, h);
}

/// Uniform in [0, 1) determined only by (key, counter).
constexpr double uniform01(std::uint64_t key, std::uint64_t counter) {
  const std::uint64_t bits = mix64(key ^ mix64(counter));
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t seed, std::string_view stage) {
  return Engine(derive_seed(seed, stage));
}

}  // namespace qmwp::rng
