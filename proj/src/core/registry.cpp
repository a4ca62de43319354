//===----------------------------------------------------------------------===//
//
// Part of the idws project, under the MIT License.
// See LICENSE for license information.
//
//===----------------------------------------------------------------------===//
#include "core/registry.hpp"

#include <cerrno>
#include <cstring>
#include <thread>

namespace idws {

namespace {

// One live registry per process; also the async handler's way back to the
// slot table. Cleared before the team joins in ~Registry, so a handler can
// never observe a registry whose slots are already gone.
std::atomic<Registry *> g_live_registry{nullptr};

// Which slot the current thread owns, for the async handler. Persists after
// a region ends; a late signal then finds a slot whose request channel is
// empty (or stale-armed, which the drain answers correctly via the context
// guard). Negative on non-team threads, where a stray signal is a no-op.
thread_local int32_t tl_slot_id = -1;

constexpr int kShareSignal = SIGUSR1;

extern "C" void idws_share_signal_handler(int) {
  int saved_errno = errno;
  Registry *reg = g_live_registry.load(std::memory_order_acquire);
  if (reg != nullptr && tl_slot_id >= 0)
    reg->drain_self(static_cast<uint32_t>(tl_slot_id));
  errno = saved_errno;
}

} // namespace

std::unique_ptr<Registry> Registry::create(uint32_t threads, TransportMode mode,
                                           PinMode pin) {
  if (threads == 0)
    throw Error(Status::InvalidArgument, "registry: thread count must be >= 1");
  // Claim the singleton slot with a placeholder before constructing, so two
  // racing creates cannot both build a team and then fight over the slot.
  Registry *expected = nullptr;
  auto placeholder = reinterpret_cast<Registry *>(&g_live_registry);
  if (!g_live_registry.compare_exchange_strong(expected, placeholder,
                                               std::memory_order_acq_rel))
    throw Error(Status::State, "registry: already initialized");
  try {
    std::unique_ptr<Registry> reg(new Registry(threads, mode, pin));
    g_live_registry.store(reg.get(), std::memory_order_release);
    return reg;
  } catch (...) {
    g_live_registry.store(nullptr, std::memory_order_release);
    throw;
  }
}

Registry::Registry(uint32_t threads, TransportMode mode, PinMode pin)
    : mode_(mode), slots_(threads), metrics_(threads) {
  if (mode_ == TransportMode::AsyncInterrupt)
    install_async_handler();
  try {
    team_ = std::make_unique<WorkerTeam>(threads, pin);
  } catch (...) {
    if (handler_installed_)
      sigaction(kShareSignal, &saved_action_, nullptr);
    throw;
  }
}

void Registry::install_async_handler() {
  struct sigaction action {};
  action.sa_handler = idws_share_signal_handler;
  sigemptyset(&action.sa_mask);
  // SA_RESTART: a worker interrupted inside a blocking primitive should
  // resume it; the handler's work happens before the restart either way.
  action.sa_flags = SA_RESTART;
  if (sigaction(kShareSignal, &action, &saved_action_) != 0)
    throw Error(Status::Internal,
                std::string("registry: sigaction failed: ") + strerror(errno));
  handler_installed_ = true;
}

Registry::~Registry() {
  // Order matters: (1) unregister so the handler turns into a no-op, (2) join
  // the team — after this no thread of ours can be inside the handler and
  // thread-directed pending signals die with their threads, (3) only then
  // give the process back its original disposition.
  g_live_registry.store(nullptr, std::memory_order_release);
  team_.reset();
  if (handler_installed_)
    sigaction(kShareSignal, &saved_action_, nullptr);
}

void Registry::record_body_error(std::exception_ptr err) {
  std::lock_guard<std::mutex> lk(error_mx_);
  if (!first_body_error_)
    first_body_error_ = err;
}

void Registry::deliver(uint32_t victim_id) {
  if (mode_ != TransportMode::AsyncInterrupt)
    return; // polling transport: the armed channel is the delivery
  int rc = pthread_kill(team_->native_handle(victim_id), kShareSignal);
  // Failure (victim thread gone) is handled by the caller's cancel path; the
  // boundary drain also still picks the request up if the thread is alive.
  (void)rc;
}

DonationReply Registry::request_share(uint32_t thief_id, uint32_t victim_id) {
  ThreadSlot &me = slots_[thief_id];
  ThreadSlot &victim = slots_[victim_id];

  // Publish identity before arming; the release on the Armed transition
  // makes it visible to whichever victim-side path claims the request.
  victim.requester_id.store(thief_id, std::memory_order_relaxed);
  RequestState expected = RequestState::Idle;
  if (!victim.request_state.compare_exchange_strong(
          expected, RequestState::Armed, std::memory_order_release,
          std::memory_order_relaxed)) {
    // Channel not idle while we hold the gate: protocol violation. Degrade
    // to a refusal rather than wedging the loop.
    assert(false && "request channel not idle under held gate");
    victim.comm_gate.release();
    return DonationReply{ReplyCode::Refused, {}};
  }
  deliver(victim_id);

  DonationReply out{ReplyCode::Refused, {}};
  const uint64_t my_ctx = me.context.load(std::memory_order_relaxed);
  {
    std::unique_lock<std::mutex> lk(me.rendezvous_mx);
    for (;;) {
      if (me.reply != ReplyCode::None)
        break;
      me.rendezvous_cv.wait_for(lk, std::chrono::milliseconds(1));
      if (me.reply != ReplyCode::None)
        break;
      // Stalled. If the victim can still answer (active, same loop), it is
      // merely slow — between boundaries or descheduled — so keep waiting.
      // Otherwise try to take the request back; losing that race means a
      // handler claimed it and the reply is imminent.
      bool victim_can_answer =
          victim.active.load(std::memory_order_acquire) &&
          victim.context.load(std::memory_order_relaxed) == my_ctx;
      if (!victim_can_answer) {
        RequestState armed = RequestState::Armed;
        if (victim.request_state.compare_exchange_strong(
                armed, RequestState::Idle, std::memory_order_acq_rel,
                std::memory_order_relaxed)) {
          // Canceled an unseen request: equivalent to a refusal.
          out = DonationReply{ReplyCode::Refused, {}};
          me.reply = ReplyCode::None;
          victim.comm_gate.release();
          return out;
        }
      }
    }
    out.outcome = me.reply;
    me.reply = ReplyCode::None;
  }
  if (out.outcome == ReplyCode::Granted) {
    // The handler wrote our slot's range before the reply was published.
    out.range.start = me.range_start.load(std::memory_order_relaxed);
    out.range.end = me.range_end.load(std::memory_order_relaxed);
  }
  victim.comm_gate.release();
  return out;
}

void Registry::loop_nowait(uint64_t n, LoopBody body, uint32_t tid) {
  const uint32_t p = thread_count();
  ThreadSlot &me = slots_[tid];
  PerThreadMetrics &pm = metrics_[tid].m;
  const uint64_t my_ctx = me.context.load(std::memory_order_relaxed);

  IterationRange r = partition_slice(n, p, tid);
  me.range_start.store(r.start, std::memory_order_relaxed);
  me.range_end.store(r.end, std::memory_order_relaxed);
  me.processed.store(0, std::memory_order_relaxed);
  me.active.store(true, std::memory_order_release); // publishes the above

  const double cpu0 = thread_cpu_now();
  uint64_t done_in_chunk = 0;
  bool body_failed = false;

  for (;;) {
    // Worker loop over the current chunk. Every boundary: advertise
    // progress, service a pending share request, re-read the (possibly
    // handler-shrunk) end, then bound-check.
    for (;;) {
      me.processed.store(done_in_chunk, std::memory_order_release);
      drain_pending_request(slots_, tid);
      uint64_t end = me.range_end.load(std::memory_order_acquire);
      uint64_t start = me.range_start.load(std::memory_order_relaxed);
      if (start + done_in_chunk >= end)
        break;
      try {
        body(start + done_in_chunk, tid);
      } catch (...) {
        record_body_error(std::current_exception());
        // Abandon the rest of this chunk (owner write): nothing left to
        // donate, and we will not thieve. The loop's result is already lost.
        me.range_end.store(start + done_in_chunk, std::memory_order_release);
        body_failed = true;
        break;
      }
      ++done_in_chunk;
    }
    ++pm.chunks_executed;

    me.active.store(false, std::memory_order_release);
    // A request armed just before the flip still deserves an answer (it will
    // be refused: the chunk is exhausted).
    drain_pending_request(slots_, tid);
    if (body_failed)
      break;

    // Thief phase: pick the most-loaded victim and ask for a donation. A
    // refusal sends us back to selection; we give up only after two empty
    // selection passes separated by a backoff, since a momentary "everyone
    // gated" blip does not mean the loop is finished.
    bool resumed = false;
    int empty_passes = 0;
    while (!resumed) {
      std::optional<uint32_t> victim = select_victim(slots_, tid, my_ctx);
      if (!victim) {
        if (++empty_passes >= 2)
          break;
        // The backoff must outlast a descheduled gate-holder's exchange, or
        // an oversubscribed machine turns every contended gate into a false
        // "loop finished" signal on the re-verify pass.
        std::this_thread::sleep_for(std::chrono::milliseconds(1));
        drain_pending_request(slots_, tid);
        continue;
      }
      empty_passes = 0;
      ++pm.steal_attempts;
      DonationReply reply = request_share(tid, *victim);
      if (reply.outcome == ReplyCode::Granted) {
        ++pm.steals_granted;
        done_in_chunk = 0; // handler already stored processed = 0
        me.active.store(true, std::memory_order_release);
        resumed = true;
      } else {
        ++pm.steals_refused;
        drain_pending_request(slots_, tid);
      }
    }
    if (!resumed)
      break;
  }

  pm.busy_s += thread_cpu_now() - cpu0;
  // Final drain, then advance: a thief that armed us after this point will
  // observe active == false (or the new context) and cancel from its side.
  drain_pending_request(slots_, tid);
  me.context.store(my_ctx + 1, std::memory_order_release);
}

RunMetrics Registry::run_region(RegionFn fn) {
  bool expected = false;
  if (!in_flight_.compare_exchange_strong(expected, true,
                                          std::memory_order_acq_rel))
    throw Error(Status::State, "registry: a loop is already in flight");
  for (MetricSlot &ms : metrics_)
    ms.m = PerThreadMetrics{};
  {
    std::lock_guard<std::mutex> lk(error_mx_);
    first_body_error_ = nullptr;
  }

  struct Trampoline {
    Registry *self;
    RegionFn *fn;
  } tramp{this, &fn};

  auto t0 = std::chrono::steady_clock::now();
  try {
    team_->run(
        [](void *arg, uint32_t tid) {
          auto *t = static_cast<Trampoline *>(arg);
          tl_slot_id = static_cast<int32_t>(tid);
          (*t->fn)(tid);
        },
        &tramp);
  } catch (...) {
    in_flight_.store(false, std::memory_order_release);
    throw;
  }
  auto t1 = std::chrono::steady_clock::now();
  in_flight_.store(false, std::memory_order_release);

  std::exception_ptr body_error;
  {
    std::lock_guard<std::mutex> lk(error_mx_);
    body_error = first_body_error_;
  }
  if (body_error) {
    try {
      std::rethrow_exception(body_error);
    } catch (const std::exception &e) {
      throw Error(Status::BodyFailed,
                  std::string("loop body failed: ") + e.what());
    } catch (...) {
      throw Error(Status::BodyFailed, "loop body failed");
    }
  }

  RunMetrics out;
  out.wall_s = std::chrono::duration<double>(t1 - t0).count();
  out.per_thread_busy.reserve(thread_count());
  for (MetricSlot &ms : metrics_) {
    out.per_thread_busy.push_back(ms.m.busy_s);
    out.steal_attempts += ms.m.steal_attempts;
    out.steals_granted += ms.m.steals_granted;
    out.steals_refused += ms.m.steals_refused;
    out.chunks_executed += ms.m.chunks_executed;
    out.checksum += ms.m.checksum;
  }
  return out;
}

RunMetrics Registry::parallel_for(uint64_t n, LoopBody body) {
  // The lambda must outlive the (non-owning) RegionFn for the whole region.
  auto driver = [&](uint32_t tid) { loop_nowait(n, body, tid); };
  RegionFn region(driver);
  return run_region(region);
}

} // namespace idws
