#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace md2d {

/// SplitMix64 finalizer; used to derive independent per-trial seeds from (seed, stream, index).
inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  return splitmix64(splitmix64(seed ^ splitmix64(stream)) + index);
}

/// Generator for trial `index` of `stream`; identical no matter which thread runs the trial.
inline std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  return std::mt19937_64(derive_seed(seed, stream, index));
}

inline double uniform(std::mt19937_64& g, double a = 0.0, double b = 1.0) {
  return std::uniform_real_distribution<double>(a, b)(g);
}

inline double gaussian(std::mt19937_64& g) { return std::normal_distribution<double>(0.0, 1.0)(g); }

/// Log-uniform on [a, b], a > 0.
inline double log_uniform(std::mt19937_64& g, double a, double b) {
  return std::exp(uniform(g, std::log(a), std::log(b)));
}

}  // namespace md2d
