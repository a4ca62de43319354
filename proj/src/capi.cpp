//===----------------------------------------------------------------------===//
//
// Part of the idws project, under the MIT License.
// See LICENSE for license information.
//
// C boundary: translates the public handle-and-status interface onto the C++
// core. No exception may cross this file; every entry point funnels through
// guarded(). Handle validity is checked against the live-handle record before
// any dereference so stale pointers (double destroy) fail cleanly.
//
//===----------------------------------------------------------------------===//
#include "idws/idws.h"

#include <atomic>
#include <cstdio>
#include <cstring>
#include <memory>
#include <new>
#include <stdexcept>

#include "core/baselines.hpp"
#include "core/registry.hpp"
#include "core/status.hpp"
#include "core/workload.hpp"

struct idws_registry {
  std::unique_ptr<idws::Registry> impl;
};

namespace {

// The one handle handed out by idws_registry_create. The core already
// enforces a single live Registry per process; mirroring the pointer here
// lets destroy/parallel_for reject stale handles without dereferencing them.
std::atomic<idws_registry *> g_live_handle{nullptr};

idws_status to_c_status(idws::Status s) {
  switch (s) {
  case idws::Status::Ok:
    return IDWS_OK;
  case idws::Status::InvalidArgument:
    return IDWS_ERR_INVALID_ARGUMENT;
  case idws::Status::State:
    return IDWS_ERR_STATE;
  case idws::Status::Unsupported:
    return IDWS_ERR_UNSUPPORTED;
  case idws::Status::Io:
    return IDWS_ERR_IO;
  case idws::Status::BodyFailed:
    return IDWS_ERR_BODY;
  case idws::Status::Internal:
    return IDWS_ERR_INTERNAL;
  }
  return IDWS_ERR_INTERNAL;
}

template <typename Fn> idws_status guarded(Fn &&fn) {
  try {
    return fn();
  } catch (const idws::Error &e) {
    return to_c_status(e.status());
  } catch (const std::invalid_argument &) {
    return IDWS_ERR_INVALID_ARGUMENT;
  } catch (const std::bad_alloc &) {
    return IDWS_ERR_INTERNAL;
  } catch (...) {
    return IDWS_ERR_INTERNAL;
  }
}

bool map_transport(idws_transport t, idws::TransportMode &out) {
  switch (t) {
  case IDWS_TRANSPORT_POLL:
    out = idws::TransportMode::BoundaryPolling;
    return true;
  case IDWS_TRANSPORT_ASYNC:
    out = idws::TransportMode::AsyncInterrupt;
    return true;
  }
  return false;
}

bool map_pin(idws_pin_mode p, idws::PinMode &out) {
  switch (p) {
  case IDWS_PIN_NONE:
    out = idws::PinMode::None;
    return true;
  case IDWS_PIN_COMPACT:
    out = idws::PinMode::Compact;
    return true;
  case IDWS_PIN_SCATTER:
    out = idws::PinMode::Scatter;
    return true;
  }
  return false;
}

bool map_scheduler(idws_scheduler s, idws::SchedulerKind &out) {
  switch (s) {
  case IDWS_SCHED_IDWS:
    out = idws::SchedulerKind::Idws;
    return true;
  case IDWS_SCHED_STATIC:
    out = idws::SchedulerKind::Static;
    return true;
  case IDWS_SCHED_STATIC_CHUNK:
    out = idws::SchedulerKind::StaticChunk;
    return true;
  case IDWS_SCHED_DYNAMIC:
    out = idws::SchedulerKind::Dynamic;
    return true;
  case IDWS_SCHED_GUIDED:
    out = idws::SchedulerKind::Guided;
    return true;
  case IDWS_SCHED_RANDOM_STEAL:
    out = idws::SchedulerKind::RandomSteal;
    return true;
  }
  return false;
}

bool map_distribution(idws_distribution d, idws::Distribution &out) {
  switch (d) {
  case IDWS_DIST_REGULAR:
    out = idws::Distribution::Regular;
    return true;
  case IDWS_DIST_RANDOM:
    out = idws::Distribution::Random;
    return true;
  case IDWS_DIST_DENSE_END:
    out = idws::Distribution::DenseEnd;
    return true;
  case IDWS_DIST_DENSE_BEGIN:
    out = idws::Distribution::DenseBegin;
    return true;
  case IDWS_DIST_PERIODIC:
    out = idws::Distribution::Periodic;
    return true;
  }
  return false;
}

void fill_metrics(idws_run_metrics *out, const idws::RunMetrics &m,
                  const idws::RunOutcome *outcome) {
  std::memset(out, 0, sizeof *out);
  out->wall_s = m.wall_s;
  try {
    out->imbalance = idws::imbalance(m);
  } catch (...) {
    out->imbalance = 0.0; // degenerate all-idle run; ratio undefined
  }
  out->steal_attempts = m.steal_attempts;
  out->steals_granted = m.steals_granted;
  out->steals_refused = m.steals_refused;
  out->chunks_executed = m.chunks_executed;
  out->checksum = m.checksum;
  if (outcome != nullptr && outcome->verify_ran) {
    out->verify_ran = 1;
    out->verify_failed = outcome->verify_ok ? 0 : 1;
    std::snprintf(out->verify_diag, sizeof out->verify_diag, "%s",
                  outcome->verify_diag.c_str());
  }
}

bool handle_is_live(const idws_registry *registry) {
  return registry != nullptr &&
         g_live_handle.load(std::memory_order_acquire) == registry;
}

} // namespace

extern "C" {

const char *idws_status_str(idws_status status) {
  switch (status) {
  case IDWS_OK:
    return "ok";
  case IDWS_ERR_INVALID_ARGUMENT:
    return "invalid argument";
  case IDWS_ERR_STATE:
    return "invalid state";
  case IDWS_ERR_UNSUPPORTED:
    return "unsupported";
  case IDWS_ERR_IO:
    return "io error";
  case IDWS_ERR_BODY:
    return "loop body failed";
  case IDWS_ERR_INTERNAL:
    return "internal error";
  }
  return "unknown status";
}

idws_status idws_registry_create(uint32_t threads, idws_transport transport,
                                 idws_pin_mode pin,
                                 idws_registry **out_registry) {
  return guarded([&]() -> idws_status {
    if (out_registry == nullptr)
      return IDWS_ERR_INVALID_ARGUMENT;
    idws::TransportMode mode;
    idws::PinMode pin_mode;
    if (!map_transport(transport, mode) || !map_pin(pin, pin_mode))
      return IDWS_ERR_INVALID_ARGUMENT;
    auto handle = std::make_unique<idws_registry>();
    handle->impl = idws::Registry::create(threads, mode, pin_mode);
    g_live_handle.store(handle.get(), std::memory_order_release);
    *out_registry = handle.release();
    return IDWS_OK;
  });
}

idws_status idws_registry_destroy(idws_registry *registry) {
  return guarded([&]() -> idws_status {
    if (registry == nullptr)
      return IDWS_ERR_INVALID_ARGUMENT;
    if (!handle_is_live(registry))
      return IDWS_ERR_STATE; // stale or foreign handle; never dereferenced
    if (registry->impl->loop_in_flight())
      return IDWS_ERR_STATE;
    idws_registry *expected = registry;
    if (!g_live_handle.compare_exchange_strong(expected, nullptr,
                                               std::memory_order_acq_rel))
      return IDWS_ERR_STATE; // lost a destroy race; the winner freed it
    delete registry;
    return IDWS_OK;
  });
}

idws_status idws_parallel_for(idws_registry *registry, uint64_t n,
                              idws_body_fn body, void *user,
                              idws_run_metrics *out_metrics) {
  return guarded([&]() -> idws_status {
    if (body == nullptr)
      return IDWS_ERR_INVALID_ARGUMENT;
    if (!handle_is_live(registry))
      return IDWS_ERR_STATE;
    auto trampoline = [body, user](uint64_t index, uint32_t thread_id) {
      body(index, thread_id, user);
    };
    idws::RunMetrics m =
        registry->impl->parallel_for(n, idws::LoopBody(trampoline));
    if (out_metrics != nullptr)
      fill_metrics(out_metrics, m, nullptr);
    return IDWS_OK;
  });
}

void idws_bench_config_init(idws_bench_config *config) {
  if (config == nullptr)
    return;
  std::memset(config, 0, sizeof *config);
  config->scheduler = IDWS_SCHED_STATIC;
  config->distribution = IDWS_DIST_REGULAR;
  config->n = 1000000;
  config->threads = 1;
  config->repeats = 1;
  config->chunk = 1;
  config->guided_multiplier = 2;
  config->work = 32;
  config->seed = 42;
  config->pin = IDWS_PIN_NONE;
}

idws_status idws_bench_run(const idws_bench_config *config,
                           idws_registry *registry, idws_run_metrics *results) {
  return guarded([&]() -> idws_status {
    if (config == nullptr || results == nullptr)
      return IDWS_ERR_INVALID_ARGUMENT;
    idws::BenchOptions opts;
    if (!map_scheduler(config->scheduler, opts.kind) ||
        !map_distribution(config->distribution, opts.spec.distribution) ||
        !map_pin(config->pin, opts.pin))
      return IDWS_ERR_INVALID_ARGUMENT;
    opts.spec.n = config->n;
    opts.spec.seed = config->seed;
    opts.spec.work = config->work;
    opts.threads = config->threads;
    opts.repeats = config->repeats;
    opts.chunk = config->chunk;
    opts.guided_multiplier = config->guided_multiplier;
    opts.verify = config->verify != 0;
    opts.inject_drop_last = config->inject_drop_last != 0;
    if (opts.kind == idws::SchedulerKind::Idws) {
      if (!handle_is_live(registry))
        return IDWS_ERR_STATE;
      opts.registry = registry->impl.get();
    }
    std::vector<idws::RunOutcome> outcomes = idws::run_benchmark(opts);
    for (size_t i = 0; i < outcomes.size(); ++i)
      fill_metrics(&results[i], outcomes[i].metrics, &outcomes[i]);
    return IDWS_OK;
  });
}

idws_status idws_states_generate(idws_distribution distribution, uint64_t n,
                                 uint64_t seed, uint8_t *out_states) {
  return guarded([&]() -> idws_status {
    if (out_states == nullptr)
      return IDWS_ERR_INVALID_ARGUMENT;
    idws::WorkloadSpec spec;
    if (!map_distribution(distribution, spec.distribution))
      return IDWS_ERR_INVALID_ARGUMENT;
    spec.n = n;
    spec.seed = seed;
    std::vector<uint8_t> states = idws::gen_states(spec);
    std::memcpy(out_states, states.data(), states.size());
    return IDWS_OK;
  });
}

idws_status idws_states_export(idws_distribution distribution, uint64_t n,
                               uint64_t seed, const char *path) {
  return guarded([&]() -> idws_status {
    if (path == nullptr)
      return IDWS_ERR_INVALID_ARGUMENT;
    idws::WorkloadSpec spec;
    if (!map_distribution(distribution, spec.distribution))
      return IDWS_ERR_INVALID_ARGUMENT;
    spec.n = n;
    spec.seed = seed;
    idws::states_export(idws::gen_states(spec), path);
    return IDWS_OK;
  });
}

} // extern "C"
