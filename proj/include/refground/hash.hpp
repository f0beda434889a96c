// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace refground {

// FNV-1a, 64 bit. Stable across platforms, unlike std::hash.
constexpr std::uint64_t fnv1a(std::string_view data,
                              std::uint64_t h = 0xcbf29ce484222325ULL) noexcept {
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

constexpr std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t v) noexcept {
  // splitmix64 finalizer over the xor
  std::uint64_t z = seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::string hex64(std::uint64_t v);

/// Uniform double in [0, 1) from a 64-bit engine, independent of the
/// standard library's distribution implementations.
template <class Engine>
double unit_uniform(Engine& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

template <class Engine>
std::size_t uniform_index(Engine& rng, std::size_t n) {
  return static_cast<std::size_t>(unit_uniform(rng) * static_cast<double>(n));
}

/// Fisher-Yates with `uniform_index`, so shuffles are reproducible everywhere.
template <class Engine, class Range>
void stable_shuffle(Range& r, Engine& rng) {
  const std::size_t n = r.size();
  for (std::size_t i = n; i > 1; --i) {
    std::size_t j = uniform_index(rng, i);
    using std::swap;
    swap(r[i - 1], r[j]);
  }
}

}  // namespace refground
