#pragma once

#include <cstdint>
#include <initializer_list>

#include "mdev/normal.hpp"

namespace mdev {

// Identifies one replicate's noise. Identical (seed, stream_id) gives
// bit-identical variates regardless of execution order or worker count.
struct NoiseStream {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
};

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Stable 64-bit hash of a word tuple, used to derive sub-run stream bases
// from (seed, theorem, epsilon, purpose) so adding a theorem to a config
// cannot perturb another theorem's draws.
inline std::uint64_t stable_hash64(std::initializer_list<std::uint64_t> words) {
  std::uint64_t h = 0x6a09e667f3bcc909ULL;
  for (std::uint64_t w : words) h = splitmix64(h ^ w);
  return h;
}

// Counter-based uniform/normal stream: variate k is a pure function of
// (seed, stream_id, k). Normals come from the inverse-CDF transform, so
// consumption order never matters.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream_id)
      : base_(splitmix64(splitmix64(seed ^ 0x5851f42d4c957f2dULL) ^ stream_id)) {}
  explicit CounterRng(const NoiseStream& s) : CounterRng(s.seed, s.stream_id) {}

  // Uniform on the open interval (0,1).
  double uniform(std::uint64_t k) const {
    const std::uint64_t bits = splitmix64(base_ + k * 0x9e3779b97f4a7c15ULL);
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal(std::uint64_t k) const { return fast_normal_quantile(uniform(k)); }

 private:
  std::uint64_t base_;
};

}  // namespace mdev
