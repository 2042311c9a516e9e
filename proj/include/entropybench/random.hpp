#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>

namespace entropybench {

/// Unbiased draw in [0, bound) by rejection on the raw 64-bit output.
/// Independent of the standard library's distribution implementations, so
/// seeded streams are reproducible across toolchains.
template <typename Engine>
std::uint64_t uniform_below(Engine& engine, std::uint64_t bound) {
  static_assert(Engine::min() == 0 && Engine::max() == UINT64_MAX, "needs a full-range 64-bit engine");
  if (bound == 0) throw std::invalid_argument("uniform_below: bound must be positive");
  const std::uint64_t reject_below = (0 - bound) % bound;  // 2^64 mod bound
  for (;;) {
    const std::uint64_t r = engine();
    if (r >= reject_below) return r % bound;
  }
}

/// SplitMix64 finalizer; used to derive independent seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

using SeededEngine = std::mt19937_64;

}  // namespace entropybench
