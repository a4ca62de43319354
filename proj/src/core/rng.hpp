//===----------------------------------------------------------------------===//
//
// Part of the idws project, under the MIT License.
// See LICENSE for license information.
//
//===----------------------------------------------------------------------===//
#ifndef IDWS_CORE_RNG_HPP
#define IDWS_CORE_RNG_HPP

#include <cstdint>

namespace idws {

// SplitMix64 (Steele/Lea/Flood mixing constants). Chosen over std::mt19937_64
// because the workload generator promises byte-identical state arrays for a
// given seed across platforms and standard library versions; splitmix's
// output sequence is pinned by these constants alone.
class SplitMix64 {
public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Unbiased draw from [0, bound) by rejection: discard the low sliver of the
  // 64-bit space that would over-represent small residues. bound must be > 0.
  uint64_t below(uint64_t bound) {
    uint64_t threshold = (0 - bound) % bound;
    uint64_t x;
    do {
      x = next();
    } while (x < threshold);
    return x % bound;
  }

private:
  uint64_t state_;
};

// Decorrelates per-thread streams derived from one user seed. Feeding
// (seed ^ mix(tid)) into SplitMix64 keeps adjacent tids far apart in state
// space even for adjacent seeds.
inline uint64_t mix_seed(uint64_t seed, uint64_t salt) {
  SplitMix64 g(seed ^ (salt * 0x9e3779b97f4a7c15ULL));
  return g.next();
}

} // namespace idws

#endif // IDWS_CORE_RNG_HPP
