//===----------------------------------------------------------------------===//
//
// Part of the idws project, under the MIT License.
// See LICENSE for license information.
//
//===----------------------------------------------------------------------===//
#ifndef IDWS_CORE_METRICS_HPP
#define IDWS_CORE_METRICS_HPP

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace idws {

// Per-run instrumentation. Threads accumulate into private PerThreadMetrics
// slots during the run; aggregation into RunMetrics happens after the team
// quiesces, so none of this needs atomics.
struct PerThreadMetrics {
  uint64_t steal_attempts = 0;
  uint64_t steals_granted = 0;
  uint64_t steals_refused = 0;
  uint64_t chunks_executed = 0; // initial chunk + one per granted/stolen chunk
  double busy_s = 0.0;          // thread CPU seconds spent inside the loop
  uint64_t checksum = 0;        // partial fold, combined by wrapping add
};

struct RunMetrics {
  double wall_s = 0.0; // dispatch to last-thread completion, host clock
  std::vector<double> per_thread_busy; // CPU seconds, one entry per thread
  uint64_t steal_attempts = 0;
  uint64_t steals_granted = 0;
  uint64_t steals_refused = 0;
  uint64_t chunks_executed = 0;
  uint64_t checksum = 0;
};

// max(busy) / mean(busy); 1.0 is perfect balance. An all-idle run has no
// meaningful ratio, so it is rejected rather than returning 0/0.
inline double imbalance(const RunMetrics &m) {
  if (m.per_thread_busy.empty())
    throw std::invalid_argument("imbalance: no threads");
  double sum = 0.0, mx = 0.0;
  for (double b : m.per_thread_busy) {
    if (b < 0.0)
      throw std::invalid_argument("imbalance: negative busy time");
    sum += b;
    if (b > mx)
      mx = b;
  }
  double mean = sum / static_cast<double>(m.per_thread_busy.size());
  if (mean <= 0.0)
    throw std::invalid_argument("imbalance: mean busy time is zero");
  return mx / mean;
}

} // namespace idws

#endif // IDWS_CORE_METRICS_HPP
