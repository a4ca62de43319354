//===----------------------------------------------------------------------===//
//
// Part of the idws project, under the MIT License.
// See LICENSE for license information.
//
//===----------------------------------------------------------------------===//
#include "core/worker_team.hpp"

#include <ctime>

#include <sched.h>
#include <unistd.h>

namespace idws {

double thread_cpu_now() {
  timespec ts{};
  clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts);
  return static_cast<double>(ts.tv_sec) + 1e-9 * static_cast<double>(ts.tv_nsec);
}

WorkerTeam::WorkerTeam(uint32_t threads, PinMode pin) : pin_(pin) {
  handles_.resize(threads);
  threads_.reserve(threads);
  for (uint32_t t = 0; t < threads; ++t)
    threads_.emplace_back([this, t] { worker_main(t); });
  // Wait for every worker to record its native handle; callers may hand out
  // transport endpoints immediately after construction.
  std::unique_lock<std::mutex> lk(mx_);
  cv_done_.wait(lk, [&] { return ready_ == size(); });
}

WorkerTeam::~WorkerTeam() {
  {
    std::lock_guard<std::mutex> lk(mx_);
    stopping_ = true;
    cv_start_.notify_all();
  }
  for (std::thread &th : threads_)
    th.join();
}

void WorkerTeam::apply_pin(uint32_t tid) {
  if (pin_ == PinMode::None)
    return;
  long ncpu_l = sysconf(_SC_NPROCESSORS_ONLN);
  uint32_t ncpu = ncpu_l > 0 ? static_cast<uint32_t>(ncpu_l) : 1;
  uint32_t cpu;
  if (pin_ == PinMode::Compact) {
    cpu = tid % ncpu;
  } else {
    // Scatter: evenly spaced over [0, ncpu). With p > ncpu the spacing wraps
    // and degenerates toward compact, which is the only honest option.
    uint32_t stride = ncpu / size();
    if (stride == 0)
      stride = 1;
    cpu = (tid * stride) % ncpu;
  }
  cpu_set_t set;
  CPU_ZERO(&set);
  CPU_SET(cpu, &set);
  // Best effort: a denied affinity call (restricted cpusets) is not fatal;
  // the CLI reports the requested mode, not a per-thread placement map.
  (void)pthread_setaffinity_np(pthread_self(), sizeof(set), &set);
}

void WorkerTeam::worker_main(uint32_t tid) {
  apply_pin(tid);
  uint64_t seen_epoch = 0;
  {
    std::lock_guard<std::mutex> lk(mx_);
    handles_[tid] = pthread_self();
    if (++ready_ == size())
      cv_done_.notify_all();
  }
  for (;;) {
    Job job;
    void *arg;
    {
      std::unique_lock<std::mutex> lk(mx_);
      cv_start_.wait(lk, [&] { return stopping_ || epoch_ != seen_epoch; });
      if (stopping_)
        return;
      seen_epoch = epoch_;
      job = job_;
      arg = arg_;
    }
    std::exception_ptr err;
    try {
      job(arg, tid);
    } catch (...) {
      err = std::current_exception();
    }
    {
      std::lock_guard<std::mutex> lk(mx_);
      if (err && !first_error_)
        first_error_ = err;
      if (++done_ == size())
        cv_done_.notify_all();
    }
  }
}

void WorkerTeam::run(Job job, void *arg) {
  std::unique_lock<std::mutex> lk(mx_);
  job_ = job;
  arg_ = arg;
  done_ = 0;
  first_error_ = nullptr;
  ++epoch_;
  cv_start_.notify_all();
  cv_done_.wait(lk, [&] { return done_ == size(); });
  if (first_error_)
    std::rethrow_exception(first_error_);
}

} // namespace idws
