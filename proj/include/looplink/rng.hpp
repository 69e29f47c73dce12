#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace looplink {

// All randomized code draws through the helpers below instead of the
// <random> distribution classes, whose output is implementation-defined.
// mt19937_64 itself produces a standardized sequence, so results are
// reproducible across compilers and platforms.
using Rng = std::mt19937_64;

// Mixes a base seed with a stream tag so that independent consumers inside
// one run (splitter, sampler, CV shuffler, ...) get decorrelated seeds.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Unbiased integer in [0, n) via rejection.
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t v = rng();
  while (v >= limit) v = rng();
  return static_cast<std::size_t>(v % n);
}

// 53-bit uniform in [0, 1).
inline double uniform_unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Standard normal via Box-Muller (stateless, two uniforms per draw).
inline double normal_unit(Rng& rng) {
  double u1 = uniform_unit(rng);
  while (u1 <= 0.0) u1 = uniform_unit(rng);
  const double u2 = uniform_unit(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

// Index draw proportional to nonnegative weights. `cumulative` holds the
// inclusive prefix sums of the weights; the final entry is the total mass.
inline std::size_t weighted_index(Rng& rng, const std::vector<double>& cumulative) {
  const double total = cumulative.back();
  const double u = uniform_unit(rng) * total;
  std::size_t lo = 0, hi = cumulative.size() - 1;
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (cumulative[mid] > u) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return lo;
}

}  // namespace looplink
