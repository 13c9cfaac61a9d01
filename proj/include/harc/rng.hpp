#pragma once

#include "harc/types.hpp"

#include <string_view>
#include <vector>

namespace harc {

/// SplitMix64 (Steele, Lea & Flood). The i-th output is mix64(seed + i*gamma),
/// i.e. a counter-based generator: streams are a pure function of (seed, i),
/// independent of platform, compiler, and standard library. Every random draw
/// in this project goes through this class so that seeded runs are
/// bit-reproducible everywhere. Never use <random> distributions: their
/// outputs are implementation-defined.
class SplitMix64 {
 public:
  explicit SplitMix64(u64 seed) : state_(seed) {}

  static u64 mix(u64 z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  u64 next() {
    state_ += 0x9E3779B97F4A7C15ull;
    u64 z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1), 53 random bits.
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  /// Unbiased uniform integer in [0, n). Rejection sampling, no modulo bias.
  u64 bounded(u64 n) {
    const u64 limit = ~u64{0} - ~u64{0} % n;
    u64 x;
    do {
      x = next();
    } while (x >= limit);
    return x % n;
  }

  /// Fisher-Yates; std::shuffle is implementation-defined, this is not.
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(bounded(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  /// k distinct elements of pool, order randomized. Partial Fisher-Yates on a
  /// copy; pool order matters for determinism, so callers pass sorted pools.
  template <class T>
  std::vector<T> sample_without_replacement(std::vector<T> pool, std::size_t k) {
    std::vector<T> out;
    out.reserve(k);
    std::size_t n = pool.size();
    for (std::size_t i = 0; i < k && i < pool.size(); ++i) {
      std::size_t j = i + static_cast<std::size_t>(bounded(n - i));
      std::swap(pool[i], pool[j]);
      out.push_back(pool[i]);
    }
    return out;
  }

 private:
  u64 state_;
};

/// Derives an independent stream seed from (seed, tag). Used to give each
/// epoch / user / tensor its own stream so draws do not shift when unrelated
/// code consumes randomness.
inline u64 rng_combine(u64 seed, u64 tag) {
  return SplitMix64::mix(seed ^ (tag + 0x9E3779B97F4A7C15ull + (seed << 6) + (seed >> 2)));
}

/// FNV-1a, for seeding per-tensor streams by parameter name.
inline u64 fnv1a(std::string_view s) {
  u64 h = 0xCBF29CE484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

}  // namespace harc
