/*===----------------------------------------------------------------------===
 *
 * Part of the idws project, under the MIT License.
 * See LICENSE for license information.
 *
 * Public C interface to the idws loop-scheduling runtime.
 *
 * The runtime schedules parallel for-loops over [0, n) with interrupt-driven
 * work sharing: busy workers advertise their progress, idle threads pick the
 * most-loaded victim and request a donation, and the victim answers on its
 * own control flow. Reference baseline schedulers (static, static-chunked,
 * dynamic, guided, random-steal) and a synthetic benchmark harness share the
 * same entry points for comparison runs.
 *
 * All functions return idws_status; out-parameters are written only on
 * IDWS_OK unless documented otherwise. The library never prints and never
 * terminates the process.
 *
 *===----------------------------------------------------------------------===*/
#ifndef IDWS_IDWS_H
#define IDWS_IDWS_H

#include <stdint.h>

#if defined(__cplusplus)
extern "C" {
#endif

#if defined(_WIN32)
#define IDWS_API __declspec(dllexport)
#else
#define IDWS_API __attribute__((visibility("default")))
#endif

typedef enum idws_status {
  IDWS_OK = 0,
  IDWS_ERR_INVALID_ARGUMENT = 1, /* a parameter violates its contract */
  IDWS_ERR_STATE = 2,            /* call illegal in the current lifecycle */
  IDWS_ERR_UNSUPPORTED = 3,      /* mode unavailable on this platform */
  IDWS_ERR_IO = 4,               /* file output failed */
  IDWS_ERR_BODY = 5,             /* a loop body failed mid-run */
  IDWS_ERR_INTERNAL = 6
} idws_status;

/* Stable, human-readable name for a status code; never NULL. */
IDWS_API const char *idws_status_str(idws_status status);

/* How a share request reaches its victim.
 * IDWS_TRANSPORT_POLL (default): the victim checks a pending-request flag at
 *   every iteration boundary and runs the donation handler synchronously.
 * IDWS_TRANSPORT_ASYNC: the victim is interrupted by an OS signal and runs
 *   the identical handler from the interruption point. Bounded-latency but
 *   relies on signal-context tolerance of the synchronization primitives. */
typedef enum idws_transport {
  IDWS_TRANSPORT_POLL = 0,
  IDWS_TRANSPORT_ASYNC = 1
} idws_transport;

typedef enum idws_pin_mode {
  IDWS_PIN_NONE = 0,    /* leave thread placement to the OS */
  IDWS_PIN_COMPACT = 1, /* consecutive logical CPUs */
  IDWS_PIN_SCATTER = 2  /* evenly spaced logical CPUs */
} idws_pin_mode;

typedef enum idws_scheduler {
  IDWS_SCHED_IDWS = 0,
  IDWS_SCHED_STATIC = 1,
  IDWS_SCHED_STATIC_CHUNK = 2, /* round-robin chunks; chunk=1 is "static,1" */
  IDWS_SCHED_DYNAMIC = 3,
  IDWS_SCHED_GUIDED = 4,
  IDWS_SCHED_RANDOM_STEAL = 5
} idws_scheduler;

typedef enum idws_distribution {
  IDWS_DIST_REGULAR = 0,
  IDWS_DIST_RANDOM = 1,
  IDWS_DIST_DENSE_END = 2,
  IDWS_DIST_DENSE_BEGIN = 3,
  IDWS_DIST_PERIODIC = 4
} idws_distribution;

/* Opaque scheduler registry: a persistent team of worker threads plus the
 * shared per-thread scheduling slots. At most one registry is live per
 * process (the async transport owns process-global signal state). */
typedef struct idws_registry idws_registry;

/* Creates the registry and spawns its worker team. threads >= 1.
 * Fails with IDWS_ERR_STATE if a registry already exists, including one
 * created by another component of the same process. */
IDWS_API idws_status idws_registry_create(uint32_t threads,
                                          idws_transport transport,
                                          idws_pin_mode pin,
                                          idws_registry **out_registry);

/* Joins the team, releases the slots, and (async transport) restores the
 * original signal disposition. Fails with IDWS_ERR_STATE if a loop is in
 * flight or the handle is not the live registry (e.g. double destroy). */
IDWS_API idws_status idws_registry_destroy(idws_registry *registry);

/* Loop body: called exactly once per index in [0, n), possibly concurrently
 * on every team thread. Distinct indices must be independent. thread_id is
 * the executing team thread in [0, threads). */
typedef void (*idws_body_fn)(uint64_t index, uint32_t thread_id, void *user);

/* Per-run measurements. For plain parallel-for runs the checksum and verify
 * fields are zero (checksumming is the benchmark harness's business). */
typedef struct idws_run_metrics {
  double wall_s;           /* dispatch to last-thread completion */
  double imbalance;        /* max/mean of per-thread busy CPU time */
  uint64_t steal_attempts;
  uint64_t steals_granted;
  uint64_t steals_refused;
  uint64_t chunks_executed;
  uint64_t checksum;
  int32_t verify_ran;
  int32_t verify_failed;
  char verify_diag[160]; /* NUL-terminated, possibly truncated */
} idws_run_metrics;

/* Runs body over [0, n) on the registry's team with interrupt-driven work
 * sharing. Blocks until every index ran. out_metrics may be NULL. */
IDWS_API idws_status idws_parallel_for(idws_registry *registry, uint64_t n,
                                       idws_body_fn body, void *user,
                                       idws_run_metrics *out_metrics);

/* One benchmark cell: scheduler x distribution at fixed parameters. */
typedef struct idws_bench_config {
  idws_scheduler scheduler;
  idws_distribution distribution;
  uint64_t n;
  uint32_t threads;
  uint32_t repeats;           /* >= 1; results must hold this many entries */
  uint64_t chunk;             /* dynamic / static-chunked / random-steal */
  uint64_t guided_multiplier; /* guided divisor multiplier, >= 1 */
  uint64_t work;              /* kernel work multiplier W, >= 1 */
  uint64_t seed;
  int32_t verify;           /* wrap the body in the exactly-once verifier */
  int32_t inject_drop_last; /* test hook: lose index n-1 (verification must
                             * then fail); keep 0 outside tests */
  idws_pin_mode pin;        /* baseline teams; the registry pins itself */
} idws_bench_config;

/* Fills a config with the documented defaults (static scheduler, regular
 * distribution, n=1000000, threads=1, repeats=1, chunk=1, multiplier=2,
 * work=32, seed=42, no verify, no pinning). */
IDWS_API void idws_bench_config_init(idws_bench_config *config);

/* Generates the state array once and runs the configured scheduler
 * config->repeats times, one results entry per repeat. registry is required
 * for IDWS_SCHED_IDWS (its thread count must equal config->threads) and
 * ignored otherwise. Checksums are filled always; verify fields only when
 * config->verify is set. A verification failure is reported in the metrics,
 * not as a status code — the run itself completed. */
IDWS_API idws_status idws_bench_run(const idws_bench_config *config,
                                    idws_registry *registry,
                                    idws_run_metrics *results);

/* Writes the n-element state array for (distribution, n, seed) into
 * out_states (caller-allocated, n bytes). Deterministic across platforms. */
IDWS_API idws_status idws_states_generate(idws_distribution distribution,
                                          uint64_t n, uint64_t seed,
                                          uint8_t *out_states);

/* Exports the state array to a flat binary file: 8-byte little-endian
 * element count, then one byte per element. */
IDWS_API idws_status idws_states_export(idws_distribution distribution,
                                        uint64_t n, uint64_t seed,
                                        const char *path);

#if defined(__cplusplus)
} /* extern "C" */
#endif

#endif /* IDWS_IDWS_H */
