#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "runbisect/runahead.hpp"

namespace runbisect {

struct Measurement {
  std::vector<std::int64_t> wall_ns;  // one entry per timed repetition
  double median_ns = 0;               // true median of wall_ns
  int repetitions = 0;
  int warmups_discarded = 0;
};

struct TimedSolve {
  Measurement measurement;
  ResultDigest digest;
};

// True median; averages the middle pair for even counts.
double median_ns(const std::vector<std::int64_t>& samples);

// Generic timing loop: runs `warmups` discarded executions, then
// `repetitions` timed ones (monotonic clock around each call), and verifies
// every execution - warmups included - returned the identical digest.
// Throws ResultInstabilityError otherwise.
TimedSolve time_executions(const std::function<ResultDigest()>& run_once,
                           int repetitions, int warmups);

// Times the given request end to end. cfg empty = serial solve; otherwise
// bisect_runahead(cfg) with thread creation inside the timed region.
TimedSolve time_solve(const SolveRequest& req,
                      const std::optional<RunaheadConfig>& cfg,
                      int repetitions, int warmups,
                      const SerialOptions& serial_opt = {});

struct SweepRecord {
  TargetFunction fn;
  Interval interval;
  int iterations = 0;  // resolved n
  int threads = 1;
  SpawnMode spawn_mode = SpawnMode::PersistentPool;
  Measurement measurement;
  double normalized_latency = 0;  // median / anchor median; anchor row is exactly 1.0
  double speedup = 0;             // anchor median / median
  ResultDigest digest;
};

// Fills normalized_latency and speedup on every record from its single-thread
// anchor: the threads == 1 record with the same function, term count,
// interval and iteration count. Throws MissingAnchorError when a record has
// no anchor.
void derive_columns(std::vector<SweepRecord>& records);

// One record per thread count (ascending); threads == 1 runs the serial
// solver and anchors the derived columns. All records must agree on the
// result digest (ResultInstabilityError otherwise).
std::vector<SweepRecord> sweep_threads(const SolveRequest& base,
                                       std::vector<int> thread_counts,
                                       SpawnMode mode, int repetitions, int warmups,
                                       std::size_t pad_stride = 128);

// One record per Taylor term count (ascending) at a fixed thread count, each
// normalized against a serial run at the same term count. threads == 1 reuses
// the anchor measurement, so its speedup is exactly 1.
std::vector<SweepRecord> sweep_latency(const SolveRequest& base,
                                       std::vector<int> terms_list, int threads,
                                       SpawnMode mode, int repetitions, int warmups,
                                       std::size_t pad_stride = 128);

// Adjacent record pairs (indices) whose median time drops by more than 5% as
// terms grow; callers surface these as warnings, not failures.
std::vector<std::pair<std::size_t, std::size_t>> monotone_cost_violations(
    const std::vector<SweepRecord>& records);

}  // namespace runbisect
