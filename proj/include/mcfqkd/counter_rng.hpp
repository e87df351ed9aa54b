// Counter-based random streams.
//
// Every (master_seed, source, trial) triple maps to its own short stream, so
// draws do not depend on evaluation order or on how many other sources exist.

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

namespace mcfqkd::rng {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t derive_key(std::uint64_t master_seed, std::uint64_t source, std::uint64_t block) {
  std::uint64_t k = mix64(master_seed + kGolden);
  k = mix64(k ^ (source * kGolden + 0x632BE59BD9B4E019ULL));
  return mix64(k ^ (block * 0xD1B54A32D192ED03ULL + kGolden));
}

/// Uniform in (0, 1], 53-bit resolution.
constexpr double to_unit_open0(std::uint64_t bits) {
  return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

/// Two independent standard normals (Box-Muller) for one counter block.
inline std::pair<double, double> normal_pair(std::uint64_t key) {
  const double u1 = to_unit_open0(mix64(key + kGolden));
  const double u2 = to_unit_open0(mix64(key + 2 * kGolden));
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double phi = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(phi), r * std::sin(phi)};
}

/// Standard normal for trial `trial` of `source`. Trials 2k and 2k+1 share a
/// Box-Muller block.
inline double standard_normal(std::uint64_t master_seed, std::uint64_t source, std::uint64_t trial) {
  const auto [a, b] = normal_pair(derive_key(master_seed, source, trial >> 1));
  return (trial & 1U) ? b : a;
}

}  // namespace mcfqkd::rng
