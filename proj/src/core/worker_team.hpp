//===----------------------------------------------------------------------===//
//
// Part of the idws project, under the MIT License.
// See LICENSE for license information.
//
//===----------------------------------------------------------------------===//
#ifndef IDWS_CORE_WORKER_TEAM_HPP
#define IDWS_CORE_WORKER_TEAM_HPP

#include <condition_variable>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include <pthread.h>

namespace idws {

// Thread-core pinning policy. None leaves placement to the OS. Compact packs
// workers onto consecutive logical CPUs; Scatter spaces them evenly across
// the logical-CPU range. No topology parsing is attempted — with SMT the two
// differ in whether siblings fill first, which is all the benchmark needs.
enum class PinMode { None, Compact, Scatter };

// Thread CPU clock, in seconds. Used for per-thread busy accounting: unlike
// wall time it is immune to preemption on oversubscribed machines, and a
// thread parked at a rendezvous accumulates none of it.
double thread_cpu_now();

// A fixed crew of P threads that park between dispatches. The team exists so
// a scheduler can assume stable native thread identities across loops (the
// async transport signals them) and so repeated loops don't pay thread
// creation inside the timed region.
//
// Dispatch protocol: run() publishes a job and bumps the epoch; workers run
// the job once each and check in; run() returns when all P checked in. One
// job in flight at a time; run() is not reentrant.
class WorkerTeam {
public:
  using Job = void (*)(void *arg, uint32_t tid);

  WorkerTeam(uint32_t threads, PinMode pin = PinMode::None);
  ~WorkerTeam();

  WorkerTeam(const WorkerTeam &) = delete;
  WorkerTeam &operator=(const WorkerTeam &) = delete;

  uint32_t size() const { return static_cast<uint32_t>(threads_.size()); }
  pthread_t native_handle(uint32_t tid) const { return handles_[tid]; }

  // Runs job(arg, tid) on every worker and waits for all of them. Rethrows
  // the first exception a job let escape (after the whole team quiesced).
  void run(Job job, void *arg);

private:
  void worker_main(uint32_t tid);
  void apply_pin(uint32_t tid);

  std::vector<std::thread> threads_;
  std::vector<pthread_t> handles_;
  PinMode pin_;

  std::mutex mx_;
  std::condition_variable cv_start_;
  std::condition_variable cv_done_;
  uint64_t epoch_ = 0;
  uint32_t ready_ = 0; // startup check-in, handles_ valid once == size()
  uint32_t done_ = 0;
  bool stopping_ = false;
  Job job_ = nullptr;
  void *arg_ = nullptr;
  std::exception_ptr first_error_;
};

} // namespace idws

#endif // IDWS_CORE_WORKER_TEAM_HPP
