#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace secretary {

// SplitMix64 finalizer; a bijection on 64-bit words with good avalanche.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Child seed as a pure function of a parent seed and an ordered key path.
constexpr std::uint64_t derive_seed(std::uint64_t parent,
                                    std::initializer_list<std::uint64_t> keys) noexcept {
  std::uint64_t h = mix64(parent);
  for (auto k : keys) h = mix64(h ^ mix64(k));
  return h;
}

// Bernoulli source backed by its own engine. Probabilities outside (0, 1)
// never consume a draw, so deterministic branches leave the stream untouched.
class EngineCoin {
 public:
  explicit EngineCoin(std::uint64_t seed = 0) : engine_(seed) {}

  bool operator()(double q) {
    if (q <= 0.0) return false;
    if (q >= 1.0) return true;
    return std::uniform_real_distribution<double>(0.0, 1.0)(engine_) < q;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace secretary
