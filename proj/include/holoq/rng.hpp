#pragma once

#include <cstdint>
#include <random>

namespace holoq {

/// splitmix64 finalizer; used to derive independent per-shot seeds from a
/// master seed so shot results do not depend on worker count or run order.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_shot_seed(std::uint64_t master_seed, std::uint64_t shot_index) {
  return splitmix64(master_seed + 0x9E3779B97F4A7C15ULL * (shot_index + 1));
}

/// Seeded uniform stream. mt19937_64 is pinned by the standard, and the
/// [0,1) conversion below avoids std::uniform_real_distribution (whose output
/// is implementation-defined), so streams are byte-stable across platforms.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : gen_(seed) {}

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n).
  std::uint64_t uniform_int(std::uint64_t n) {
    // Rejection sampling to avoid modulo bias.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v = gen_();
    while (v >= limit) v = gen_();
    return v % n;
  }

  static const char* algorithm_name() { return "mt19937_64+splitmix64"; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace holoq
