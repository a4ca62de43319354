//===----------------------------------------------------------------------===//
//
// Part of the idws project, under the MIT License.
// See LICENSE for license information.
//
//===----------------------------------------------------------------------===//
//
// Synthetic benchmark workload: a states array in {0..3} drawn from one of
// five distributions, and a state-dependent compute kernel whose cost is
// strictly ordered by state. Plus the run harness: exactly-once verification,
// order-independent checksumming, and per-scheduler dispatch.
//
//===----------------------------------------------------------------------===//
#ifndef IDWS_CORE_WORKLOAD_HPP
#define IDWS_CORE_WORKLOAD_HPP

#include <atomic>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <string>
#include <vector>

#include "core/baselines.hpp"
#include "core/metrics.hpp"
#include "core/registry.hpp"

namespace idws {

enum class Distribution { Regular, Random, DenseEnd, DenseBegin, Periodic };

struct WorkloadSpec {
  Distribution distribution = Distribution::Regular;
  uint64_t n = 1'000'000;
  uint64_t seed = 42;
  uint64_t work = 32; // W: inner-loop term count per state level
};

// Deterministic for (distribution, n, seed): the generator is SplitMix64 and
// the sampling is rejection-based, so the array is byte-identical across
// platforms and standard libraries.
//   Regular   — all 2.
//   Random    — i.i.d. uniform over {0,1,2,3}.
//   DenseEnd  — first 10% i.i.d. uniform {0,1,2}, middle 80% all 0 (no
//               work), last 10% all 3: the work piles up at the end.
//   DenseBegin— element-wise mirror of DenseEnd for the same seed.
//   Periodic  — i mod 4.
std::vector<uint8_t> gen_states(const WorkloadSpec &spec);

// State-dependent kernel. Costs nest strictly: state 0 does nothing, each
// higher state adds another transcendental block. Deterministic for fixed
// (i, state, W); the return value must reach a checksum so the work cannot
// be dead-code-eliminated.
double kernel_cost(uint64_t i, uint8_t state, uint64_t W);

// Order-independent reduction of kernel outputs: fixed-point (2^20) integer
// folding under wrapping addition, so the total is bit-identical regardless
// of which thread executed which index in what order.
inline uint64_t checksum_fold(double v) {
  return static_cast<uint64_t>(
      static_cast<int64_t>(std::llround(v * 1048576.0)));
}

// Exactly-once oracle: a shared bitmap with atomic set-and-test marks.
class VisitBitmap {
public:
  explicit VisitBitmap(uint64_t n);

  // Called from the verification body wrapper, concurrently on all threads.
  void mark(uint64_t index);

  struct Report {
    bool ok = false;
    uint64_t marked = 0;
    std::vector<uint64_t> missing;    // at most the first 10
    std::vector<uint64_t> duplicates; // at most the first 10
    std::string to_string() const;
  };
  Report verify() const; // call after the run quiesced

private:
  uint64_t n_;
  std::vector<std::atomic<uint64_t>> words_;
  mutable std::mutex dup_mx_;
  std::vector<uint64_t> duplicates_; // guarded by dup_mx_
};

// Flat binary export for cross-implementation comparison: 8-byte
// little-endian element count, then one byte per element.
void states_export(const std::vector<uint8_t> &states, const std::string &path);

struct BenchOptions {
  SchedulerKind kind = SchedulerKind::Static;
  WorkloadSpec spec;
  uint32_t threads = 1;
  uint32_t repeats = 1;
  uint64_t chunk = 1;             // dynamic / static-chunked / random-steal
  uint64_t guided_multiplier = 2;
  bool verify = false;
  bool inject_drop_last = false; // test hook: silently skip index n-1
  PinMode pin = PinMode::None;   // baseline teams; the registry pins itself
  Registry *registry = nullptr;  // required for SchedulerKind::Idws
};

struct RunOutcome {
  RunMetrics metrics;
  bool verify_ran = false;
  bool verify_ok = true;
  std::string verify_diag;
};

// Generates the state array once, then runs the selected scheduler `repeats`
// times over body(i) = kernel_cost(i, states[i], W), folding per-thread
// checksum partials. Baseline schedulers get a fresh team per repeat; the
// IDWS registry brings its own persistent team.
std::vector<RunOutcome> run_benchmark(const BenchOptions &opts);

} // namespace idws

#endif // IDWS_CORE_WORKLOAD_HPP
