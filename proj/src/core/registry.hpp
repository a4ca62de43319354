//===----------------------------------------------------------------------===//
//
// Part of the idws project, under the MIT License.
// See LICENSE for license information.
//
//===----------------------------------------------------------------------===//
//
// The scheduler registry: a persistent worker team plus one ThreadSlot per
// thread, implementing the interrupt-driven work-sharing loop.
//
// Lifecycle: at most one live Registry per process. The async transport
// installs a process-global signal disposition and the handler needs an
// unambiguous owner, so "create while another exists" is a state error
// rather than a footgun.
//
//===----------------------------------------------------------------------===//
#ifndef IDWS_CORE_REGISTRY_HPP
#define IDWS_CORE_REGISTRY_HPP

#include <chrono>
#include <csignal>
#include <memory>

#include "core/function_ref.hpp"
#include "core/metrics.hpp"
#include "core/status.hpp"
#include "core/thread_slot.hpp"
#include "core/worker_team.hpp"

namespace idws {

enum class TransportMode { BoundaryPolling, AsyncInterrupt };

struct DonationReply {
  ReplyCode outcome = ReplyCode::Refused;
  IterationRange range{}; // meaningful iff outcome == Granted
};

class Registry {
public:
  // Throws Error{InvalidArgument} for threads == 0, Error{State} if another
  // registry is live. The team is spawned here so transport endpoints
  // (native thread handles) exist before the first loop.
  static std::unique_ptr<Registry> create(uint32_t threads, TransportMode mode,
                                          PinMode pin = PinMode::None);
  ~Registry();

  Registry(const Registry &) = delete;
  Registry &operator=(const Registry &) = delete;

  uint32_t thread_count() const { return slots_.size(); }
  TransportMode transport() const { return mode_; }
  bool loop_in_flight() const {
    return in_flight_.load(std::memory_order_acquire);
  }

  // Host-side entry: runs body over [0, n) on the whole team and waits for
  // completion. Exactly-once over indices; work moves between threads via
  // donations. Rethrows the first body exception after the team quiesced.
  RunMetrics parallel_for(uint64_t n, LoopBody body);

  // Host-side generalization: dispatches fn(tid) on the whole team; fn may
  // call loop_nowait several times to run back-to-back barrier-free loops.
  // Context counters confine donations to one loop generation.
  using RegionFn = FunctionRef<void(uint32_t tid)>;
  RunMetrics run_region(RegionFn fn);

  // Worker-side loop driver; callable only from team threads inside a
  // region. Returns with this thread's context advanced; other threads may
  // still be working (nowait).
  void loop_nowait(uint64_t n, LoopBody body, uint32_t tid);

  // Test access to shared state (reads race by design, like any thief's).
  SlotTable &slots() { return slots_; }

  // Services a pending share request on this thread's own slot, if any.
  // Called from iteration boundaries, idle phases, and the signal handler.
  bool drain_self(uint32_t tid) { return drain_pending_request(slots_, tid); }

private:
  Registry(uint32_t threads, TransportMode mode, PinMode pin);

  // Thief-side request: publish identity, arm the victim's channel, deliver,
  // park at our rendezvous until answered (or until we cancel a request the
  // victim can no longer see). Precondition: we hold the victim's comm_gate;
  // the gate is released before returning.
  DonationReply request_share(uint32_t thief_id, uint32_t victim_id);

  void deliver(uint32_t victim_id); // transport-specific nudge
  void install_async_handler();
  void record_body_error(std::exception_ptr err);

  struct alignas(kCacheLine) MetricSlot {
    PerThreadMetrics m;
  };

  TransportMode mode_;
  SlotTable slots_;
  std::vector<MetricSlot> metrics_;
  std::unique_ptr<WorkerTeam> team_; // destroyed (joined) before slots_
  std::atomic<bool> in_flight_{false};

  std::mutex error_mx_;
  std::exception_ptr first_body_error_;

  bool handler_installed_ = false;
  struct sigaction saved_action_ {};
};

} // namespace idws

#endif // IDWS_CORE_REGISTRY_HPP
