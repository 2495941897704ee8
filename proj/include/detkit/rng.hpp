// Copyright (c) 2026 the detkit authors.
// Licensed under the Apache License 2.0.

/**
 * @file detkit/rng.hpp
 * @brief Seeded randomness helpers with portable, reproducible output.
 *
 * Everything that draws random numbers in this library goes through the
 * utilities below. std::mt19937_64 has a fully specified output sequence,
 * and the bounded draw / shuffle / uniform helpers are written out by hand,
 * so identical seeds give identical results on every platform and standard
 * library. std::uniform_int_distribution and std::shuffle are avoided on
 * purpose: their outputs are implementation-defined.
 */

#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace detkit {

/// Single-pass 64-bit mixer (splitmix64 finalizer). Good for deriving
/// independent child seeds from a master seed plus an index.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Child seed for stream `index` of master seed `seed`.
inline std::uint64_t child_seed(std::uint64_t seed, std::uint64_t index) {
  return mix64(seed ^ mix64(index + 1));
}

/// Uniform draw in [0, n). Modulo reduction; the tiny bias is irrelevant for
/// the bound sizes used here (shuffles, subset picks) and keeps the mapping
/// trivially portable.
inline std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
  return rng() % n;
}

/// Uniform double in [lo, hi).
inline double uniform_real(std::mt19937_64& rng, double lo, double hi) {
  const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + unit * (hi - lo);
}

/// In-place Fisher-Yates shuffle driven by `rng`.
template <typename T>
void fisher_yates(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(bounded(rng, i));
    if (j != i - 1) std::swap(v[i - 1], v[j]);
  }
}

}  // namespace detkit
