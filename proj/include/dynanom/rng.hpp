#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

// Deterministic sampling helpers. std::mt19937_64 produces a pinned bit
// stream, but the std::*_distribution adaptors do not, so every transform
// from raw 64-bit words to a variate is spelled out here. Byte-identical
// output across platforms and reruns depends on nothing else being used.
namespace dynanom::rng {

using Engine = std::mt19937_64;

// splitmix64 step; used to derive independent per-node engine seeds.
inline std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix(seed ^ mix(stream));
}

// Uniform in [0, 1): top 53 bits of one engine word.
inline double uniform01(Engine& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n); n must be > 0. Modulo bias is negligible for
// the small n used here and keeps the draw at exactly one engine word.
inline std::uint64_t below(Engine& eng, std::uint64_t n) { return eng() % n; }

// Inverse CDF; consumes one word. log1p(-u) is finite since u < 1.
inline double exponential(Engine& eng, double mean) {
  return -mean * std::log1p(-uniform01(eng));
}

// Box-Muller without the cached spare; consumes two words per call.
inline double normal(Engine& eng, double mean, double stddev) {
  double u1 = 1.0 - uniform01(eng);  // (0, 1]
  double u2 = uniform01(eng);
  double r = std::sqrt(-2.0 * std::log(u1));
  return mean + stddev * r * std::cos(2.0 * std::numbers::pi * u2);
}

// Fisher-Yates; one word per swap.
template <typename T>
void shuffle(std::vector<T>& items, Engine& eng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(below(eng, i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace dynanom::rng
