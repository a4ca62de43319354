//===----------------------------------------------------------------------===//
//
// Part of the idws project, under the MIT License.
// See LICENSE for license information.
//
//===----------------------------------------------------------------------===//
#ifndef IDWS_CORE_ITERATION_RANGE_HPP
#define IDWS_CORE_ITERATION_RANGE_HPP

#include <cstdint>
#include <vector>

namespace idws {

// Half-open index interval [start, end). All loops in this runtime run over
// 0..n with stride 1 and an unsigned index; strided or signed loops are the
// caller's mapping problem.
struct IterationRange {
  uint64_t start = 0;
  uint64_t end = 0;

  uint64_t size() const { return end - start; }
  bool empty() const { return start >= end; }
  friend bool operator==(const IterationRange &, const IterationRange &) =
      default;
};

// Thread t's slice of the even split of [0, n) into p contiguous ranges; the
// first n % p slices carry one extra iteration. Allocation-free so loop
// drivers can call it per thread.
inline IterationRange partition_slice(uint64_t n, uint32_t p, uint32_t t) {
  uint64_t base = n / p;
  uint64_t extra = n % p;
  uint64_t start = static_cast<uint64_t>(t) * base + (t < extra ? t : extra);
  uint64_t len = base + (t < extra ? 1 : 0);
  return IterationRange{start, start + len};
}

// Even split of [0, n) into p contiguous ranges; the first n % p ranges carry
// one extra iteration. n = 0 yields p empty ranges.
inline std::vector<IterationRange> partition_static(uint64_t n, uint32_t p) {
  std::vector<IterationRange> out(p);
  for (uint32_t t = 0; t < p; ++t)
    out[t] = partition_slice(n, p, t);
  return out;
}

} // namespace idws

#endif // IDWS_CORE_ITERATION_RANGE_HPP
