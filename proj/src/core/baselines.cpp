//===----------------------------------------------------------------------===//
//
// Part of the idws project, under the MIT License.
// See LICENSE for license information.
//
//===----------------------------------------------------------------------===//
#include "core/baselines.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <chrono>
#include <thread>

#include "core/status.hpp"
#include "core/thread_slot.hpp" // kCacheLine

namespace idws {

namespace {

struct alignas(kCacheLine) PaddedMetrics {
  PerThreadMetrics m;
};

// Common host-side frame: time the dispatch, then fold per-thread metrics.
template <typename Ctx>
RunMetrics run_team(WorkerTeam &team, Ctx &ctx, WorkerTeam::Job job) {
  auto t0 = std::chrono::steady_clock::now();
  team.run(job, &ctx);
  auto t1 = std::chrono::steady_clock::now();
  RunMetrics out;
  out.wall_s = std::chrono::duration<double>(t1 - t0).count();
  out.per_thread_busy.reserve(team.size());
  for (const PaddedMetrics &pm : ctx.metrics) {
    out.per_thread_busy.push_back(pm.m.busy_s);
    out.steal_attempts += pm.m.steal_attempts;
    out.steals_granted += pm.m.steals_granted;
    out.steals_refused += pm.m.steals_refused;
    out.chunks_executed += pm.m.chunks_executed;
  }
  return out;
}

} // namespace

//===--- static ----------------------------------------------------------===//

namespace {
struct StaticCtx {
  uint64_t n;
  uint32_t p;
  LoopBody *body;
  std::vector<PaddedMetrics> metrics;
};
} // namespace

RunMetrics static_for(WorkerTeam &team, uint64_t n, LoopBody body) {
  StaticCtx ctx{n, team.size(), &body, std::vector<PaddedMetrics>(team.size())};
  return run_team(team, ctx, [](void *arg, uint32_t tid) {
    auto &c = *static_cast<StaticCtx *>(arg);
    PerThreadMetrics &pm = c.metrics[tid].m;
    double cpu0 = thread_cpu_now();
    IterationRange r = partition_slice(c.n, c.p, tid);
    for (uint64_t i = r.start; i < r.end; ++i)
      (*c.body)(i, tid);
    ++pm.chunks_executed;
    pm.busy_s += thread_cpu_now() - cpu0;
  });
}

//===--- static, chunked round-robin -------------------------------------===//

namespace {
struct ChunkedCtx {
  uint64_t n;
  uint64_t chunk;
  uint32_t p;
  LoopBody *body;
  std::vector<PaddedMetrics> metrics;
};
} // namespace

RunMetrics static_chunked_for(WorkerTeam &team, uint64_t n, uint64_t chunk,
                              LoopBody body) {
  if (chunk == 0)
    throw Error(Status::InvalidArgument, "static_chunked_for: chunk must be >= 1");
  ChunkedCtx ctx{n, chunk, team.size(), &body,
                 std::vector<PaddedMetrics>(team.size())};
  return run_team(team, ctx, [](void *arg, uint32_t tid) {
    auto &c = *static_cast<ChunkedCtx *>(arg);
    PerThreadMetrics &pm = c.metrics[tid].m;
    double cpu0 = thread_cpu_now();
    if (c.n > 0) {
      uint64_t last_block = (c.n - 1) / c.chunk;
      for (uint64_t b = tid; b <= last_block; b += c.p) {
        uint64_t lo = b * c.chunk;
        uint64_t hi = std::min(lo + c.chunk, c.n);
        for (uint64_t i = lo; i < hi; ++i)
          (*c.body)(i, tid);
        ++pm.chunks_executed;
      }
    }
    pm.busy_s += thread_cpu_now() - cpu0;
  });
}

//===--- dynamic ----------------------------------------------------------===//

namespace {
struct DynamicCtx {
  uint64_t n;
  uint64_t chunk;
  LoopBody *body;
  alignas(kCacheLine) std::atomic<uint64_t> next{0};
  std::vector<PaddedMetrics> metrics;
};
} // namespace

RunMetrics dynamic_for(WorkerTeam &team, uint64_t n, uint64_t chunk,
                       LoopBody body) {
  if (chunk == 0)
    throw Error(Status::InvalidArgument, "dynamic_for: chunk must be >= 1");
  DynamicCtx ctx{n, chunk, &body, {}, std::vector<PaddedMetrics>(team.size())};
  return run_team(team, ctx, [](void *arg, uint32_t tid) {
    auto &c = *static_cast<DynamicCtx *>(arg);
    PerThreadMetrics &pm = c.metrics[tid].m;
    double cpu0 = thread_cpu_now();
    for (;;) {
      uint64_t lo = c.next.fetch_add(c.chunk, std::memory_order_relaxed);
      if (lo >= c.n)
        break;
      uint64_t hi = std::min(lo + c.chunk, c.n);
      for (uint64_t i = lo; i < hi; ++i)
        (*c.body)(i, tid);
      ++pm.chunks_executed;
    }
    pm.busy_s += thread_cpu_now() - cpu0;
  });
}

//===--- guided ------------------------------------------------------------===//

uint64_t guided_next_chunk(uint64_t remaining, uint32_t p,
                           uint64_t multiplier) {
  assert(remaining >= 1 && p >= 1 && multiplier >= 1);
  uint64_t divisor = multiplier * static_cast<uint64_t>(p);
  uint64_t size = remaining / divisor + (remaining % divisor != 0 ? 1 : 0);
  return size < 1 ? 1 : size;
}

std::vector<IterationRange> guided_schedule(uint64_t n, uint32_t p,
                                            uint64_t multiplier) {
  std::vector<IterationRange> out;
  uint64_t at = 0;
  while (at < n) {
    // One round: p equal chunks at the size the current remainder dictates.
    // The final grabs of the schedule may truncate at n.
    uint64_t size = guided_next_chunk(n - at, p, multiplier);
    for (uint32_t k = 0; k < p && at < n; ++k) {
      uint64_t hi = std::min(at + size, n);
      out.push_back(IterationRange{at, hi});
      at = hi;
    }
  }
  return out;
}

namespace {
struct GuidedCtx {
  const std::vector<IterationRange> *schedule;
  LoopBody *body;
  alignas(kCacheLine) std::atomic<uint64_t> grab{0};
  std::vector<PaddedMetrics> metrics;
};
} // namespace

RunMetrics guided_for(WorkerTeam &team, uint64_t n, uint64_t multiplier,
                      LoopBody body) {
  if (multiplier == 0)
    throw Error(Status::InvalidArgument, "guided_for: multiplier must be >= 1");
  if (multiplier > UINT64_MAX / team.size())
    throw Error(Status::InvalidArgument, "guided_for: multiplier overflow");
  // Built before dispatch, outside the timed window — like static's
  // partition arithmetic. What stays on the timed path is the per-grab
  // fetch_add, which is the overhead guided scheduling actually carries.
  std::vector<IterationRange> schedule =
      guided_schedule(n, team.size(), multiplier);
  GuidedCtx ctx{&schedule, &body, {}, std::vector<PaddedMetrics>(team.size())};
  return run_team(team, ctx, [](void *arg, uint32_t tid) {
    auto &c = *static_cast<GuidedCtx *>(arg);
    PerThreadMetrics &pm = c.metrics[tid].m;
    double cpu0 = thread_cpu_now();
    const auto &sched = *c.schedule;
    for (;;) {
      uint64_t j = c.grab.fetch_add(1, std::memory_order_relaxed);
      if (j >= sched.size())
        break;
      for (uint64_t i = sched[j].start; i < sched[j].end; ++i)
        (*c.body)(i, tid);
      ++pm.chunks_executed;
    }
    pm.busy_s += thread_cpu_now() - cpu0;
  });
}

//===--- random steal ------------------------------------------------------===//

uint32_t random_steal_pick_victim(uint32_t self, uint32_t p, SplitMix64 &rng) {
  assert(p >= 2);
  uint32_t v = static_cast<uint32_t>(rng.below(p - 1));
  return v >= self ? v + 1 : v;
}

namespace {

constexpr uint64_t pack_range(uint64_t s, uint64_t e) { return s << 32 | e; }
constexpr uint64_t range_start_of(uint64_t bits) { return bits >> 32; }
constexpr uint64_t range_end_of(uint64_t bits) { return bits & 0xffffffffULL; }

struct alignas(kCacheLine) PackedRange {
  std::atomic<uint64_t> bits{0};
};

struct StealCtx {
  uint64_t n;
  uint64_t chunk;
  uint64_t seed;
  uint32_t p;
  LoopBody *body;
  std::vector<PackedRange> ranges;
  alignas(kCacheLine) std::atomic<uint64_t> done{0};
  std::vector<PaddedMetrics> metrics;
};

// Owner side: claim the front iteration. Thieves only ever shorten the end,
// so the owner's CAS loses at most to an end-shrink and retries.
bool pop_front(PackedRange &pr, uint64_t &index) {
  uint64_t cur = pr.bits.load(std::memory_order_relaxed);
  for (;;) {
    uint64_t s = range_start_of(cur), e = range_end_of(cur);
    if (s >= e)
      return false;
    if (pr.bits.compare_exchange_weak(cur, pack_range(s + 1, e),
                                      std::memory_order_acq_rel,
                                      std::memory_order_relaxed)) {
      index = s;
      return true;
    }
  }
}

// Thief side: cut up to min(chunk, remaining/2) off the back. Full-value CAS
// is ABA-safe here: a range's front index stays with its owner until that
// iteration executes (steals take proper suffixes only), and an executed
// index can never become pending again, so no packed value ever recurs.
bool steal_back(PackedRange &pr, uint64_t max_take, IterationRange &out) {
  uint64_t cur = pr.bits.load(std::memory_order_relaxed);
  for (;;) {
    uint64_t s = range_start_of(cur), e = range_end_of(cur);
    uint64_t remaining = e > s ? e - s : 0;
    uint64_t take = std::min(max_take, remaining / 2);
    if (take == 0)
      return false;
    if (pr.bits.compare_exchange_weak(cur, pack_range(s, e - take),
                                      std::memory_order_acq_rel,
                                      std::memory_order_relaxed)) {
      out = IterationRange{e - take, e};
      return true;
    }
  }
}

void steal_worker(void *arg, uint32_t tid) {
  auto &c = *static_cast<StealCtx *>(arg);
  PerThreadMetrics &pm = c.metrics[tid].m;
  double cpu0 = thread_cpu_now();
  SplitMix64 rng(mix_seed(c.seed, tid));
  PackedRange &mine = c.ranges[tid];
  ++pm.chunks_executed; // the initial static partition
  uint64_t executed_since_flush = 0;
  uint32_t failed_probes = 0;
  for (;;) {
    // Drain whatever our packed range currently holds.
    uint64_t i;
    while (pop_front(mine, i)) {
      (*c.body)(i, tid);
      ++executed_since_flush;
    }
    if (executed_since_flush > 0) {
      c.done.fetch_add(executed_since_flush, std::memory_order_relaxed);
      executed_since_flush = 0;
    }
    if (c.done.load(std::memory_order_relaxed) >= c.n)
      break;
    if (c.p == 1)
      continue; // nobody to steal from; loop until stragglers... none: done
    // Probe a uniformly random other thread.
    uint32_t victim = random_steal_pick_victim(tid, c.p, rng);
    ++pm.steal_attempts;
    IterationRange cut;
    if (steal_back(c.ranges[victim], c.chunk, cut)) {
      ++pm.steals_granted;
      ++pm.chunks_executed;
      failed_probes = 0;
      // Install the cut as our own range; safe to store (not CAS) because
      // thieves never touch an empty range and ours is empty right now.
      mine.bits.store(pack_range(cut.start, cut.end),
                      std::memory_order_release);
    } else {
      ++pm.steals_refused;
      // Near the end everything shrinks below stealable size; don't burn
      // the core spinning while the last owners finish.
      if (++failed_probes % (4 * c.p) == 0)
        std::this_thread::sleep_for(std::chrono::microseconds(50));
      else
        std::this_thread::yield();
    }
  }
  pm.busy_s += thread_cpu_now() - cpu0;
}

} // namespace

RunMetrics random_steal_for(WorkerTeam &team, uint64_t n, uint64_t chunk,
                            uint64_t seed, LoopBody body) {
  if (chunk == 0)
    throw Error(Status::InvalidArgument, "random_steal_for: chunk must be >= 1");
  if (n > 0xffffffffULL)
    throw Error(Status::InvalidArgument,
                "random_steal_for: n exceeds the packed 32-bit index range");
  StealCtx ctx{n,  chunk, seed, team.size(), &body, {}, {},
               std::vector<PaddedMetrics>(team.size())};
  ctx.ranges = std::vector<PackedRange>(team.size());
  auto parts = partition_static(n, team.size());
  for (uint32_t t = 0; t < team.size(); ++t)
    ctx.ranges[t].bits.store(pack_range(parts[t].start, parts[t].end),
                             std::memory_order_relaxed);
  return run_team(team, ctx, steal_worker);
}

} // namespace idws
