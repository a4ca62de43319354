//===----------------------------------------------------------------------===//
//
// Part of the idws project, under the MIT License.
// See LICENSE for license information.
//
//===----------------------------------------------------------------------===//
//
// Shared per-thread scheduling state and the victim-side donation protocol.
//
// Field ownership contract (the whole design hangs on this):
//   - range_start/range_end are written only on the owner's control flow:
//     either in the loop driver or inside the donation handler, which always
//     executes on the owner's thread. Exception: a victim's handler writes
//     the *thief's* range while the thief is parked at its rendezvous, which
//     is ordered by the rendezvous mutex.
//   - processed is single-writer (owner, release at each iteration boundary),
//     multi-reader (thieves take racy snapshots; estimates saturate).
//   - requester_id / request_state form the request channel, serialized by
//     comm_gate so a victim ever has at most one request in flight.
//   - reply is written by the victim and read by the parked thief, both under
//     the thief's rendezvous mutex.
//
//===----------------------------------------------------------------------===//
#ifndef IDWS_CORE_THREAD_SLOT_HPP
#define IDWS_CORE_THREAD_SLOT_HPP

#include <algorithm>
#include <atomic>
#include <cassert>
#include <condition_variable>
#include <cstdint>
#include <mutex>
#include <optional>
#include <vector>

#include "core/donation.hpp"

namespace idws {

inline constexpr std::size_t kCacheLine = 64;

// Try-acquire-only mutual exclusion admitting at most one thief per victim.
// Not a std::mutex: we need try_acquire from arbitrary threads, release from
// the same thief later, and no undefined behavior if a probe ever hits its
// own gate — an atomic flag gives all three and is async-signal-tolerant.
class CommGate {
public:
  bool try_acquire() {
    return !held_.test_and_set(std::memory_order_acquire);
  }
  void release() { held_.clear(std::memory_order_release); }
  // Test-only observer; racy by nature.
  bool is_held() const { return held_.test(std::memory_order_relaxed); }

private:
  std::atomic_flag held_ = ATOMIC_FLAG_INIT;
};

// Lifecycle of the one-deep request channel in each victim slot.
// Idle -> Armed: thief, after publishing requester_id (release).
// Armed -> Claimed: victim's control flow takes ownership (acquire); the
//   handler then runs to completion and reopens the channel (-> Idle).
// Armed -> Idle: thief cancels a request the victim never claimed (the
//   victim may have exited the loop); the thief treats this as a refusal.
// The CAS transitions make "handled exactly once" and "canceled" mutually
// exclusive outcomes even when a poll-side drain races an async interrupt.
enum class RequestState : uint32_t { Idle = 0, Armed = 1, Claimed = 2 };

enum class ReplyCode : uint32_t { None = 0, Granted = 1, Refused = 2 };

struct alignas(kCacheLine) ThreadSlot {
  // Worker state, owner-published.
  std::atomic<uint64_t> range_start{0};
  std::atomic<uint64_t> range_end{0};
  std::atomic<uint64_t> processed{0};
  std::atomic<uint64_t> context{0};
  std::atomic<bool> active{false};

  // Victim-side request channel.
  CommGate comm_gate;
  std::atomic<RequestState> request_state{RequestState::Idle};
  std::atomic<uint32_t> requester_id{0};

  // Thief-side rendezvous: this slot's owner parks here while a victim
  // decides. reply is guarded by rendezvous_mx.
  std::mutex rendezvous_mx;
  std::condition_variable rendezvous_cv;
  ReplyCode reply = ReplyCode::None;
};

class SlotTable {
public:
  explicit SlotTable(uint32_t count) : slots_(count) {}

  uint32_t size() const { return static_cast<uint32_t>(slots_.size()); }
  ThreadSlot &operator[](uint32_t id) { return slots_[id]; }
  const ThreadSlot &operator[](uint32_t id) const { return slots_[id]; }

private:
  std::vector<ThreadSlot> slots_;
};

// Heuristic work-left estimate from a (possibly racing) snapshot. Saturates
// instead of wrapping when the snapshot is internally inconsistent.
inline uint64_t estimate_remaining(uint64_t start, uint64_t end,
                                   uint64_t processed) {
  uint64_t len = end >= start ? end - start : 0;
  return processed < len ? len - processed : 0;
}

inline uint64_t estimate_remaining(const ThreadSlot &slot) {
  // Snapshot reads may race the owner; any interleaving yields a usable
  // estimate because the subtraction saturates.
  uint64_t end = slot.range_end.load(std::memory_order_acquire);
  uint64_t start = slot.range_start.load(std::memory_order_relaxed);
  uint64_t processed = slot.processed.load(std::memory_order_relaxed);
  return estimate_remaining(start, end, processed);
}

// Pick the most-loaded donation candidate: threads other than self that are
// active in the same context, ranked by estimated remaining work (ties break
// toward the lowest id, for determinism). Returns the first candidate whose
// comm_gate we win, with the gate HELD — the caller owns releasing it.
// Returns nullopt after one full descending pass without a win; the caller's
// retry policy decides whether that means "done" or "try again shortly".
inline std::optional<uint32_t> select_victim(SlotTable &slots, uint32_t self_id,
                                             uint64_t ctx) {
  struct Candidate {
    uint64_t remaining;
    uint32_t id;
  };
  const uint32_t p = slots.size();
  std::vector<Candidate> ranked;
  ranked.reserve(p);
  for (uint32_t t = 0; t < p; ++t) {
    if (t == self_id)
      continue;
    ThreadSlot &s = slots[t];
    if (!s.active.load(std::memory_order_acquire))
      continue;
    if (s.context.load(std::memory_order_relaxed) != ctx)
      continue;
    ranked.push_back(Candidate{estimate_remaining(s), t});
  }
  std::sort(ranked.begin(), ranked.end(), [](const Candidate &a, const Candidate &b) {
    return a.remaining != b.remaining ? a.remaining > b.remaining
                                      : a.id < b.id;
  });
  for (const Candidate &c : ranked) {
    if (slots[c.id].comm_gate.try_acquire())
      return c.id;
  }
  return std::nullopt;
}

// Victim-side donation decision. Runs on the victim's own control flow after
// it claimed the pending request (request_state Armed -> Claimed); the thief
// holds our comm_gate and is parked at its rendezvous.
//
// Grants only within a matching loop context — with nowait loops a thief may
// still sit in loop k while we already advanced to k+1, and handing it a
// range from the wrong iteration space would corrupt both loops.
//
// On a grant, the victim shrinks its own end first and installs the donated
// suffix (plus processed = 0) into the thief's slot; the rendezvous mutex
// publishes those writes to the thief before it can wake. The channel is
// reopened (Idle) before the notify: the thief still holds our comm_gate, so
// no new request can arrive until it wakes and releases the gate, and by then
// the Idle store is visible along the mutex/gate chain.
inline void handle_share_request(ThreadSlot &victim, ThreadSlot &thief) {
  assert(victim.request_state.load(std::memory_order_relaxed) ==
         RequestState::Claimed);
  ReplyCode code = ReplyCode::Refused;
  if (victim.context.load(std::memory_order_relaxed) ==
      thief.context.load(std::memory_order_relaxed)) {
    // Owner reads of owner-written fields: no synchronization needed.
    uint64_t start = victim.range_start.load(std::memory_order_relaxed);
    uint64_t end = victim.range_end.load(std::memory_order_relaxed);
    uint64_t processed = victim.processed.load(std::memory_order_relaxed);
    if (auto d = split_donation(start, end, processed)) {
      victim.range_end.store(d->new_victim_end, std::memory_order_release);
      thief.range_start.store(d->thief_range.start, std::memory_order_relaxed);
      thief.range_end.store(d->thief_range.end, std::memory_order_relaxed);
      thief.processed.store(0, std::memory_order_relaxed);
      code = ReplyCode::Granted;
    }
  }
  victim.request_state.store(RequestState::Idle, std::memory_order_relaxed);
  {
    std::lock_guard<std::mutex> lk(thief.rendezvous_mx);
    thief.reply = code;
    thief.rendezvous_cv.notify_one();
  }
}

// Claim-and-handle for the slot owner: services a pending request if one is
// armed. Safe to call from the boundary poll, the idle phases, and the async
// interrupt path concurrently — the Armed -> Claimed CAS elects exactly one
// handler execution per request. Returns true if a request was handled.
inline bool drain_pending_request(SlotTable &slots, uint32_t self_id) {
  ThreadSlot &me = slots[self_id];
  if (me.request_state.load(std::memory_order_relaxed) != RequestState::Armed)
    return false;
  RequestState expected = RequestState::Armed;
  if (!me.request_state.compare_exchange_strong(expected, RequestState::Claimed,
                                                std::memory_order_acquire,
                                                std::memory_order_relaxed))
    return false; // canceled by the thief, or claimed by the other drain path
  uint32_t thief_id = me.requester_id.load(std::memory_order_relaxed);
  assert(thief_id < slots.size() && thief_id != self_id);
  handle_share_request(me, slots[thief_id]);
  return true;
}

} // namespace idws

#endif // IDWS_CORE_THREAD_SLOT_HPP
