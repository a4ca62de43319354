//===----------------------------------------------------------------------===//
//
// Part of the idws project, under the MIT License.
// See LICENSE for license information.
//
//===----------------------------------------------------------------------===//
//
// Reference loop schedulers sharing the parallel-for contract with the IDWS
// runtime, for apples-to-apples benchmarking: classic static, interleaved
// static (chunked round-robin), dynamic self-scheduling, guided with
// exponentially shrinking chunks, and a range-based random work stealer.
//
//===----------------------------------------------------------------------===//
#ifndef IDWS_CORE_BASELINES_HPP
#define IDWS_CORE_BASELINES_HPP

#include <cstdint>
#include <vector>

#include "core/function_ref.hpp"
#include "core/iteration_range.hpp"
#include "core/metrics.hpp"
#include "core/rng.hpp"
#include "core/worker_team.hpp"

namespace idws {

enum class SchedulerKind {
  Idws,
  Static,
  StaticChunk, // fixed-size chunks dealt round-robin ("static,1" with chunk=1)
  Dynamic,
  Guided,
  RandomSteal,
};

// Each thread runs exactly its static partition; no runtime coordination.
RunMetrics static_for(WorkerTeam &team, uint64_t n, LoopBody body);

// Round-robin interleave: thread t executes all i with (i/chunk) % p == t.
RunMetrics static_chunked_for(WorkerTeam &team, uint64_t n, uint64_t chunk,
                              LoopBody body);

// Shared counter, fetched-and-added by chunk; the fetching thread executes
// [old, min(old+chunk, n)).
RunMetrics dynamic_for(WorkerTeam &team, uint64_t n, uint64_t chunk,
                       LoopBody body);

// Size of the next guided chunk: max(1, ceil(remaining / (multiplier * p))).
uint64_t guided_next_chunk(uint64_t remaining, uint32_t p, uint64_t multiplier);

// The full guided grab schedule. Chunk sizes are recomputed per round of p
// grabs, not per grab: within a round all p chunks share one size, which is
// what produces the canonical 8,8,8,8,4,4,4,4,... staircase for (60, 4, 2)
// instead of the 8,7,6,... slide a per-grab recomputation would give.
std::vector<IterationRange> guided_schedule(uint64_t n, uint32_t p,
                                            uint64_t multiplier);

RunMetrics guided_for(WorkerTeam &team, uint64_t n, uint64_t multiplier,
                      LoopBody body);

// Classic random work stealing over index ranges: per-thread (start, end)
// pairs packed into one 64-bit atomic; owners pop single iterations from the
// front, thieves CAS away up to min(chunk, remaining/2) from the back of a
// uniformly random victim and install the cut as their own range. Requires
// n < 2^32 (the packing); larger loops are rejected.
RunMetrics random_steal_for(WorkerTeam &team, uint64_t n, uint64_t chunk,
                            uint64_t seed, LoopBody body);

// Victim choice used by random_steal_for, exposed for distribution tests:
// uniform over the p-1 threads other than self.
uint32_t random_steal_pick_victim(uint32_t self, uint32_t p, SplitMix64 &rng);

} // namespace idws

#endif // IDWS_CORE_BASELINES_HPP
