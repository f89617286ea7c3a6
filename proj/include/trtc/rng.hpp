// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include "trtc/core.hpp"

namespace trtc {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives a stream key from a base seed and an ordered list of counters.
/// The key depends only on the values, never on call order, so serial and
/// parallel schedules draw identical streams.
inline constexpr std::uint64_t derive_key(std::uint64_t seed,
                                          std::initializer_list<std::uint64_t> counters) {
  std::uint64_t k = mix64(seed);
  for (auto c : counters) k = mix64(k ^ mix64(c + 0x632be59bd9b4e019ULL));
  return k;
}

/// Stream purposes used by the harness.
enum class Purpose : std::uint64_t {
  Channel = 1,
  Benchmark = 2,
  Symbols = 3,
  Noise = 4,
  Training = 5,
};

inline Rng make_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> counters) {
  return Rng(derive_key(seed, counters));
}

/// CN(0, variance) draw.
inline cplx cscg(Rng& rng, double variance = 1.0) {
  std::normal_distribution<double> n(0.0, std::sqrt(variance / 2.0));
  const double re = n(rng);
  const double im = n(rng);
  return {re, im};
}

inline CVec cscg_vector(Rng& rng, Eigen::Index n, double variance = 1.0) {
  CVec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = cscg(rng, variance);
  return v;
}

inline double uniform(Rng& rng, double lo = 0.0, double hi = 1.0) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace trtc
