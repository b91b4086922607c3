// Copyright 2026 the n2r authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string_view>

namespace n2r {

// splitmix64 finalizer. Every pseudo-random decision in the toolkit is
// derived from this one mixing function so that datasets, renders and
// reports are reproducible from a single 64-bit seed. Constants are the
// canonical splitmix64 ones.
inline constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// FNV-1a, used to turn stage names ("fit", "test", ...) into salts.
inline constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ull;
  }
  return h;
}

// Deterministic seed derivation: child = mix64(parent ^ mix64(salt)).
inline constexpr std::uint64_t seed_chain(std::uint64_t parent, std::uint64_t salt) {
  return mix64(parent ^ mix64(salt));
}
inline constexpr std::uint64_t seed_chain(std::uint64_t parent, std::string_view stage) {
  return seed_chain(parent, fnv1a64(stage));
}

// Minimal counter-based generator on top of mix64.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1), 53 mantissa bits.
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n). Modulo reduction: the bias for the n used
  // here (image sizes, frame counts) is far below anything observable,
  // and the sequence stays identical across platforms.
  std::uint64_t next_below(std::uint64_t n) { return n ? next() % n : 0; }

 private:
  std::uint64_t state_;
};

}  // namespace n2r
