#pragma once

#include <cstdint>
#include <initializer_list>
#include <string_view>
#include <random>

namespace gridbench {

/// SplitMix64 finalizer; used only to derive substream seeds from a campaign
/// seed plus a path of identifiers (link id, flow id, ...).
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t root,
                                 std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = mix64(root);
  for (std::uint64_t x : path) s = mix64(s ^ mix64(x));
  return s;
}

/// FNV-1a, for folding names into seed paths. Stable across platforms,
/// unlike std::hash.
inline std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Seedable draw stream. mt19937_64 so the raw 64-bit output sequence is
/// pinned by the standard; the float mappings are hand-rolled because the
/// std distributions are not portable across library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform in [0, 1) with 53-bit resolution.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + uniform01() * (hi - lo); }

  bool bernoulli(double p) { return uniform01() < p; }

  /// Uniform integer in [lo, hi] inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(next_u64() % span);
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace gridbench
