//===----------------------------------------------------------------------===//
//
// Part of the idws project, under the MIT License.
// See LICENSE for license information.
//
// Acceptance gate: twelve numbered criteria covering correctness oracles,
// protocol arithmetic, scheduling trends, and stress soundness. Each prints
// exactly one [PASS]/[FAIL] line with measured evidence; the exit status is
// 0 iff every selected criterion passed.
//
// Usage: idws_acceptance [N...]   (default: all of 1..12)
//
// The wall-time trend criteria (4-7) compare schedulers under real
// parallelism; on a machine without multiple cores they measure honestly and
// report what they see. Criteria are never weakened to fit the machine.
//
//===----------------------------------------------------------------------===//
#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <future>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "core/baselines.hpp"
#include "core/donation.hpp"
#include "core/registry.hpp"
#include "core/rng.hpp"
#include "core/thread_slot.hpp"
#include "core/workload.hpp"

using namespace idws;

namespace {

struct Outcome {
  bool pass = false;
  std::string evidence;
};

double now_s() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

uint32_t hardware_max_threads() {
  // "hardware max" with a floor of 8: the trend criteria are specified for
  // p >= 8, and the protocol must hold even oversubscribed.
  return std::max(8u, std::thread::hardware_concurrency());
}

std::vector<RunOutcome> bench(SchedulerKind kind, Distribution dist,
                              uint64_t n, uint64_t work, uint32_t threads,
                              uint32_t repeats, bool verify, Registry *reg,
                              uint64_t chunk = 1, uint64_t mult = 2,
                              uint64_t seed = 42) {
  BenchOptions o;
  o.kind = kind;
  o.spec.distribution = dist;
  o.spec.n = n;
  o.spec.work = work;
  o.spec.seed = seed;
  o.threads = threads;
  o.repeats = repeats;
  o.chunk = chunk;
  o.guided_multiplier = mult;
  o.verify = verify;
  o.registry = reg;
  return run_benchmark(o);
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  size_t mid = v.size() / 2;
  return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

double median_wall(const std::vector<RunOutcome> &outs) {
  std::vector<double> w;
  for (const RunOutcome &o : outs)
    w.push_back(o.metrics.wall_s);
  return median(w);
}

double median_imbalance(const std::vector<RunOutcome> &outs) {
  std::vector<double> w;
  for (const RunOutcome &o : outs)
    w.push_back(imbalance(o.metrics));
  return median(w);
}

const char *dist_name(Distribution d) {
  switch (d) {
  case Distribution::Regular:
    return "regular";
  case Distribution::Random:
    return "random";
  case Distribution::DenseEnd:
    return "dense-end";
  case Distribution::DenseBegin:
    return "dense-begin";
  case Distribution::Periodic:
    return "periodic";
  }
  return "?";
}

const char *sched_name(SchedulerKind k) {
  switch (k) {
  case SchedulerKind::Idws:
    return "idws";
  case SchedulerKind::Static:
    return "static";
  case SchedulerKind::StaticChunk:
    return "static1";
  case SchedulerKind::Dynamic:
    return "dynamic";
  case SchedulerKind::Guided:
    return "guided";
  case SchedulerKind::RandomSteal:
    return "randsteal";
  }
  return "?";
}

constexpr Distribution kAllDists[] = {Distribution::Regular,
                                      Distribution::Random,
                                      Distribution::DenseEnd,
                                      Distribution::DenseBegin,
                                      Distribution::Periodic};
constexpr SchedulerKind kBaselines[] = {
    SchedulerKind::Static, SchedulerKind::StaticChunk, SchedulerKind::Dynamic,
    SchedulerKind::Guided, SchedulerKind::RandomSteal};

std::string fmt(const char *f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return buf;
}

//===----------------------------------------------------------------------===//
// 1. Exactly-once suite: every scheduler x distribution x p x transport,
//    n=1e5, 20 repetitions each, all runs verified. Budget 5 min.
//===----------------------------------------------------------------------===//
Outcome criterion1() {
  const double t0 = now_s();
  const uint64_t n = 100000, work = 1;
  const uint32_t reps = 20;
  std::vector<uint32_t> ps = {1, 2, 4, hardware_max_threads()};
  ps.erase(std::unique(ps.begin(), ps.end()), ps.end());

  uint64_t runs = 0, failures = 0;
  std::string first_diag;
  auto account = [&](const std::vector<RunOutcome> &outs) {
    for (const RunOutcome &o : outs) {
      ++runs;
      if (!(o.verify_ran && o.verify_ok)) {
        ++failures;
        if (first_diag.empty())
          first_diag = o.verify_diag;
      }
    }
  };

  for (uint32_t p : ps) {
    for (TransportMode mode :
         {TransportMode::BoundaryPolling, TransportMode::AsyncInterrupt}) {
      auto reg = Registry::create(p, mode);
      for (Distribution d : kAllDists)
        account(bench(SchedulerKind::Idws, d, n, work, p, reps, true,
                      reg.get()));
    }
    for (SchedulerKind k : kBaselines)
      for (Distribution d : kAllDists)
        account(bench(k, d, n, work, p, reps, true, nullptr));
  }

  const double dt = now_s() - t0;
  bool pass = failures == 0 && dt < 300.0;
  std::string ev = fmt("%llu runs (poll+async idws, 5 baselines), %llu "
                       "verification failures, %.1f s (budget 300)",
                       (unsigned long long)runs, (unsigned long long)failures,
                       dt);
  if (!first_diag.empty())
    ev += " first: " + first_diag;
  return {pass, ev};
}

//===----------------------------------------------------------------------===//
// 2. Donation arithmetic vs an independent margin-and-halve reference over
//    all (start, end, processed) with end <= 64. Budget 1 s.
//===----------------------------------------------------------------------===//
Outcome criterion2() {
  const double t0 = now_s();
  uint64_t cases = 0, mismatches = 0;
  for (uint64_t start = 0; start <= 64; ++start) {
    for (uint64_t end = start; end <= 64; ++end) {
      for (uint64_t processed = 0; processed <= (end - start) + 2;
           ++processed) {
        ++cases;
        // Reference, written against the protocol rule: keep what is done,
        // keep one margin iteration, give away half of what is left, and
        // only if that half is nonempty.
        std::optional<Donation> ref;
        uint64_t len = end - start;
        if (processed < len) {
          uint64_t remaining = len - processed;
          uint64_t give = (remaining - 1) / 2;
          if (give > 0)
            ref = Donation{end - give, IterationRange{end - give, end}};
        }
        std::optional<Donation> got = split_donation(start, end, processed);
        bool same = ref.has_value() == got.has_value() &&
                    (!ref || (ref->new_victim_end == got->new_victim_end &&
                              ref->thief_range == got->thief_range));
        if (!same)
          ++mismatches;
      }
    }
  }
  const double dt = now_s() - t0;
  bool pass = mismatches == 0 && dt < 1.0;
  return {pass, fmt("%llu cases, %llu mismatches, %.3f s (budget 1)",
                    (unsigned long long)cases, (unsigned long long)mismatches,
                    dt)};
}

//===----------------------------------------------------------------------===//
// 3. Guided golden sequence for (n=60, p=4, multiplier=2). Budget 1 s.
//===----------------------------------------------------------------------===//
Outcome criterion3() {
  const double t0 = now_s();
  const uint64_t golden[] = {8, 8, 8, 8, 4, 4, 4, 4, 2, 2, 2, 2, 1, 1, 1, 1};
  std::vector<IterationRange> sched = guided_schedule(60, 4, 2);
  bool match = sched.size() == 16;
  uint64_t cursor = 0;
  for (size_t i = 0; match && i < sched.size(); ++i) {
    match = sched[i].start == cursor && sched[i].size() == golden[i];
    cursor = sched[i].end;
  }
  match = match && cursor == 60;
  const double dt = now_s() - t0;
  std::string sizes;
  for (const IterationRange &r : sched)
    sizes += std::to_string(r.size()) + ",";
  return {match && dt < 1.0,
          fmt("grab sizes [%s] vs golden 8x4,4x4,2x4,1x4, %.3f s (budget 1)",
              sizes.c_str(), dt)};
}

// Shared helper for the trend criteria: median wall ratio of a baseline over
// idws at fixed (distribution, n, work, p).
struct Trend {
  double base_s;
  double idws_s;
  double ratio() const { return base_s / idws_s; }
};
Trend measure_trend(SchedulerKind base, Distribution dist, uint64_t n,
                    uint64_t work, uint32_t p, uint64_t chunk,
                    uint32_t reps = 3) {
  auto reg = Registry::create(p, TransportMode::BoundaryPolling);
  double idws_s = median_wall(
      bench(SchedulerKind::Idws, dist, n, work, p, reps, false, reg.get()));
  reg.reset();
  double base_s =
      median_wall(bench(base, dist, n, work, p, reps, false, nullptr, chunk));
  return {base_s, idws_s};
}

//===----------------------------------------------------------------------===//
// 4. Static >= 2.0x idws on dense-end and dense-begin, n=1e6, W=32, p=8.
//    Budget 2 min.
//===----------------------------------------------------------------------===//
Outcome criterion4() {
  const double t0 = now_s();
  const uint32_t p = hardware_max_threads();
  Trend de = measure_trend(SchedulerKind::Static, Distribution::DenseEnd,
                           1000000, 32, p, 1);
  Trend db = measure_trend(SchedulerKind::Static, Distribution::DenseBegin,
                           1000000, 32, p, 1);
  const double dt = now_s() - t0;
  bool pass = de.ratio() >= 2.0 && db.ratio() >= 2.0 && dt < 120.0;
  return {pass, fmt("static/idws dense-end %.2fx (%.3f/%.3f s), dense-begin "
                    "%.2fx (%.3f/%.3f s), need >= 2.0 at p=%u "
                    "(hw threads %u), %.1f s (budget 120)",
                    de.ratio(), de.base_s, de.idws_s, db.ratio(), db.base_s,
                    db.idws_s, p, std::thread::hardware_concurrency(), dt)};
}

//===----------------------------------------------------------------------===//
// 5. static1 >= 2.0x idws on periodic, n=1e6, p=4.
//===----------------------------------------------------------------------===//
Outcome criterion5() {
  Trend t = measure_trend(SchedulerKind::StaticChunk, Distribution::Periodic,
                          1000000, 32, 4, 1);
  bool pass = t.ratio() >= 2.0;
  return {pass, fmt("static1/idws periodic %.2fx (%.3f/%.3f s), need >= 2.0 "
                    "at p=4 (hw threads %u)",
                    t.ratio(), t.base_s, t.idws_s,
                    std::thread::hardware_concurrency())};
}

//===----------------------------------------------------------------------===//
// 6. guided >= 1.3x idws on dense-begin, n=1e6, p=8.
//===----------------------------------------------------------------------===//
Outcome criterion6() {
  const uint32_t p = hardware_max_threads();
  Trend t = measure_trend(SchedulerKind::Guided, Distribution::DenseBegin,
                          1000000, 32, p, 1);
  bool pass = t.ratio() >= 1.3;
  return {pass, fmt("guided/idws dense-begin %.2fx (%.3f/%.3f s), need >= "
                    "1.3 at p=%u (hw threads %u)",
                    t.ratio(), t.base_s, t.idws_s, p,
                    std::thread::hardware_concurrency())};
}

//===----------------------------------------------------------------------===//
// 7. dynamic(chunk=1) >= 1.5x idws on regular, n=1e6, p=8. W=1 keeps the
//    per-iteration work small enough for the self-scheduling overhead the
//    criterion targets to be visible at all.
//===----------------------------------------------------------------------===//
Outcome criterion7() {
  const uint32_t p = hardware_max_threads();
  Trend t = measure_trend(SchedulerKind::Dynamic, Distribution::Regular,
                          1000000, 1, p, 1);
  bool pass = t.ratio() >= 1.5;
  return {pass, fmt("dynamic(1)/idws regular %.2fx (%.3f/%.3f s), need >= "
                    "1.5 at p=%u (hw threads %u)",
                    t.ratio(), t.base_s, t.idws_s, p,
                    std::thread::hardware_concurrency())};
}

//===----------------------------------------------------------------------===//
// 8. All-rounder: idws median <= 1.15x the best scheduler per distribution,
//    n=1e6, W=32, p=8.
//===----------------------------------------------------------------------===//
Outcome criterion8() {
  const uint32_t p = hardware_max_threads();
  const uint64_t n = 1000000, work = 32;
  const uint32_t reps = 3;
  bool pass = true;
  std::string ev;
  auto reg = Registry::create(p, TransportMode::BoundaryPolling);
  for (Distribution d : kAllDists) {
    double idws_s = median_wall(
        bench(SchedulerKind::Idws, d, n, work, p, reps, false, reg.get()));
    double best = idws_s;
    const char *best_name = "idws";
    for (SchedulerKind k : kBaselines) {
      double s = median_wall(bench(k, d, n, work, p, reps, false, nullptr));
      if (s < best) {
        best = s;
        best_name = sched_name(k);
      }
    }
    double rel = idws_s / best;
    pass = pass && rel <= 1.15;
    ev += fmt("%s %.3f (best %s %.3f, %.2fx); ", dist_name(d), idws_s,
              best_name, best, rel);
  }
  return {pass, ev + fmt("need <= 1.15x at p=%u", p)};
}

//===----------------------------------------------------------------------===//
// 9. Balance: imbalance(idws) <= 1.3 and imbalance(static) >= 1.8 on
//    dense-begin, n=1e6, p=8.
//===----------------------------------------------------------------------===//
Outcome criterion9() {
  const uint32_t p = hardware_max_threads();
  const uint64_t n = 1000000, work = 32;
  auto reg = Registry::create(p, TransportMode::BoundaryPolling);
  double idws_imb = median_imbalance(bench(
      SchedulerKind::Idws, Distribution::DenseBegin, n, work, p, 5, false,
      reg.get()));
  reg.reset();
  double static_imb = median_imbalance(bench(
      SchedulerKind::Static, Distribution::DenseBegin, n, work, p, 5, false,
      nullptr));
  bool pass = idws_imb <= 1.3 && static_imb >= 1.8;
  return {pass, fmt("imbalance idws %.3f (need <= 1.3), static %.3f (need >= "
                    "1.8), dense-begin p=%u",
                    idws_imb, static_imb, p)};
}

//===----------------------------------------------------------------------===//
// 10. Checksum invariance: every distribution, all six schedulers,
//     p in {1, max}: bit-identical checksums. Budget 1 min.
//===----------------------------------------------------------------------===//
Outcome criterion10() {
  const double t0 = now_s();
  const uint64_t n = 100000, work = 32;
  uint64_t cells = 0, mismatches = 0;
  for (Distribution d : kAllDists) {
    bool have_ref = false;
    uint64_t ref = 0;
    for (uint32_t p : {1u, hardware_max_threads()}) {
      auto reg = Registry::create(p, TransportMode::BoundaryPolling);
      for (SchedulerKind k :
           {SchedulerKind::Idws, SchedulerKind::Static,
            SchedulerKind::StaticChunk, SchedulerKind::Dynamic,
            SchedulerKind::Guided, SchedulerKind::RandomSteal}) {
        Registry *r = k == SchedulerKind::Idws ? reg.get() : nullptr;
        uint64_t sum =
            bench(k, d, n, work, p, 1, false, r)[0].metrics.checksum;
        ++cells;
        if (!have_ref) {
          ref = sum;
          have_ref = true;
        } else if (sum != ref) {
          ++mismatches;
        }
      }
    }
  }
  const double dt = now_s() - t0;
  bool pass = mismatches == 0 && dt < 60.0;
  return {pass, fmt("%llu scheduler/thread-count cells over 5 distributions, "
                    "%llu checksum mismatches, %.1f s (budget 60)",
                    (unsigned long long)cells, (unsigned long long)mismatches,
                    dt)};
}

//===----------------------------------------------------------------------===//
// 11. Victim-selection oracle on >= 1000 randomized frozen snapshots.
//     Budget 5 s.
//===----------------------------------------------------------------------===//
Outcome criterion11() {
  const double t0 = now_s();
  SplitMix64 rng(0xacce97a);
  uint64_t trials = 1500, mismatches = 0;
  for (uint64_t trial = 0; trial < trials; ++trial) {
    uint32_t p = 2 + static_cast<uint32_t>(rng.below(15)); // 2..16
    SlotTable slots(p);
    uint64_t ctx = rng.below(3);
    for (uint32_t t = 0; t < p; ++t) {
      uint64_t start = rng.below(100);
      uint64_t len = rng.below(1000);
      slots[t].range_start.store(start);
      slots[t].range_end.store(start + len);
      slots[t].processed.store(rng.below(len + 2));
      slots[t].context.store(rng.below(3));
      slots[t].active.store(rng.below(4) != 0);
      if (rng.below(4) == 0)
        slots[t].comm_gate.try_acquire();
    }
    uint32_t self = static_cast<uint32_t>(rng.below(p));

    // Brute-force reference on the frozen table.
    bool found = false;
    uint64_t best_rem = 0;
    uint32_t best_id = 0;
    for (uint32_t t = 0; t < p; ++t) {
      if (t == self || !slots[t].active.load() ||
          slots[t].context.load() != ctx || slots[t].comm_gate.is_held())
        continue;
      uint64_t rem = estimate_remaining(slots[t]);
      if (!found || rem > best_rem) {
        found = true;
        best_rem = rem;
        best_id = t;
      }
    }
    std::optional<uint32_t> got = select_victim(slots, self, ctx);
    bool same =
        got.has_value() == found && (!found || (*got == best_id &&
                                                slots[*got].comm_gate.is_held()));
    if (!same)
      ++mismatches;
  }
  const double dt = now_s() - t0;
  bool pass = mismatches == 0 && dt < 5.0;
  return {pass, fmt("%llu snapshots (p up to 16), %llu mismatches vs brute "
                    "force, %.3f s (budget 5)",
                    (unsigned long long)trials,
                    (unsigned long long)mismatches, dt)};
}

//===----------------------------------------------------------------------===//
// 12. Stress: 100 consecutive idws runs, n=1e5, p=hardware max, random
//     distribution, poll transport; watchdog 30 s per run.
//===----------------------------------------------------------------------===//
Outcome criterion12() {
  const uint32_t p = hardware_max_threads();
  const uint64_t n = 100000, work = 32;
  auto reg = Registry::create(p, TransportMode::BoundaryPolling);
  double max_run = 0.0;
  for (int run = 0; run < 100; ++run) {
    const double t0 = now_s();
    auto fut = std::async(std::launch::async, [&]() {
      return bench(SchedulerKind::Idws, Distribution::Random, n, work, p, 1,
                   true, reg.get(), 1, 2, 42 + run);
    });
    if (fut.wait_for(std::chrono::seconds(30)) !=
        std::future_status::ready) {
      // The team is wedged; nothing can be unwound safely past this point.
      std::printf("[FAIL] criterion 12: run %d exceeded the 30 s watchdog\n",
                  run);
      std::fflush(stdout);
      std::_Exit(1);
    }
    std::vector<RunOutcome> outs = fut.get();
    if (!(outs[0].verify_ran && outs[0].verify_ok))
      return {false, fmt("run %d failed verification: %s", run,
                         outs[0].verify_diag.c_str())};
    max_run = std::max(max_run, now_s() - t0);
  }
  return {true, fmt("100 runs at p=%u verified, slowest run %.2f s "
                    "(watchdog 30)",
                    p, max_run)};
}

using CriterionFn = Outcome (*)();
constexpr CriterionFn kCriteria[12] = {
    criterion1, criterion2, criterion3, criterion4,  criterion5,  criterion6,
    criterion7, criterion8, criterion9, criterion10, criterion11, criterion12,
};

} // namespace

int main(int argc, char **argv) {
  std::vector<int> selected;
  for (int a = 1; a < argc; ++a) {
    int num = std::atoi(argv[a]);
    if (num < 1 || num > 12) {
      std::fprintf(stderr, "usage: %s [criterion 1..12]...\n", argv[0]);
      return 2;
    }
    selected.push_back(num);
  }
  if (selected.empty())
    for (int i = 1; i <= 12; ++i)
      selected.push_back(i);

  int failed = 0;
  for (int num : selected) {
    Outcome o = kCriteria[num - 1]();
    std::printf("[%s] criterion %d: %s\n", o.pass ? "PASS" : "FAIL", num,
                o.evidence.c_str());
    std::fflush(stdout);
    if (!o.pass)
      ++failed;
  }
  std::printf("%d/%d criteria passed\n", int(selected.size()) - failed,
              int(selected.size()));
  return failed == 0 ? 0 : 1;
}
