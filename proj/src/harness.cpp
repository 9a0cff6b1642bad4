#include "runbisect/harness.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cstdint>
#include <optional>
#include <string>

#include "runbisect/errors.hpp"

namespace runbisect {

namespace {

std::uint64_t bits(double v) { return std::bit_cast<std::uint64_t>(v); }

// Anchor matching is bit-exact on the problem parameters: a record may only be
// normalized against a single-thread run of the very same instance.
bool same_problem(const SweepRecord& r, const SweepRecord& a) {
  return r.fn.family == a.fn.family && r.fn.taylor.terms == a.fn.taylor.terms &&
         bits(r.fn.shift) == bits(a.fn.shift) &&
         bits(r.interval.a()) == bits(a.interval.a()) &&
         bits(r.interval.b()) == bits(a.interval.b()) &&
         r.iterations == a.iterations;
}

}  // namespace

double median_ns(const std::vector<std::int64_t>& samples) {
  if (samples.empty()) {
    throw InputDomainError("median of an empty sample set");
  }
  std::vector<std::int64_t> sorted(samples);
  std::sort(sorted.begin(), sorted.end());
  const std::size_t m = sorted.size() / 2;
  if (sorted.size() % 2 == 1) return static_cast<double>(sorted[m]);
  return (static_cast<double>(sorted[m - 1]) + static_cast<double>(sorted[m])) /
         2.0;
}

TimedSolve time_executions(const std::function<ResultDigest()>& run_once,
                           int repetitions, int warmups) {
  if (!run_once) throw InputDomainError("timing requires a runnable solve");
  if (repetitions < 1) throw InputDomainError("repetitions must be >= 1");
  if (warmups < 0) throw InputDomainError("warmup count must be >= 0");

  std::optional<ResultDigest> reference;
  const auto check = [&reference](const ResultDigest& d) {
    if (!reference) {
      reference = d;
    } else if (!(d == *reference)) {
      throw ResultInstabilityError(
          "executions disagree: repeated solves of one instance must return "
          "identical results");
    }
  };

  for (int w = 0; w < warmups; ++w) check(run_once());

  Measurement m;
  m.repetitions = repetitions;
  m.warmups_discarded = warmups;
  m.wall_ns.reserve(static_cast<std::size_t>(repetitions));
  for (int r = 0; r < repetitions; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    const ResultDigest d = run_once();
    const auto t1 = std::chrono::steady_clock::now();
    check(d);
    m.wall_ns.push_back(
        std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count());
  }
  m.median_ns = median_ns(m.wall_ns);
  return {std::move(m), *reference};
}

TimedSolve time_solve(const SolveRequest& req,
                      const std::optional<RunaheadConfig>& cfg, int repetitions,
                      int warmups, const SerialOptions& serial_opt) {
  if (cfg.has_value() && (serial_opt.literal_alg1 || serial_opt.observer)) {
    throw ConfigError(
        "serial-only options (literal mode, step observer) cannot be combined "
        "with a thread team");
  }
  if (cfg.has_value()) cfg->validate();
  return time_executions(
      [&req, &cfg, &serial_opt]() {
        return cfg.has_value() ? digest(bisect_runahead(req, *cfg))
                               : digest(bisect_serial(req, serial_opt));
      },
      repetitions, warmups);
}

void derive_columns(std::vector<SweepRecord>& records) {
  for (auto& r : records) {
    if (r.threads == 1) {
      r.normalized_latency = 1.0;
      r.speedup = 1.0;
      continue;
    }
    const SweepRecord* anchor = nullptr;
    for (const auto& c : records) {
      if (c.threads == 1 && same_problem(r, c)) {
        anchor = &c;
        break;
      }
    }
    if (anchor == nullptr) {
      throw MissingAnchorError("no single-thread anchor for " +
                               function_name(r.fn) + " at " +
                               std::to_string(r.iterations) + " iterations");
    }
    r.normalized_latency = r.measurement.median_ns / anchor->measurement.median_ns;
    r.speedup = anchor->measurement.median_ns / r.measurement.median_ns;
  }
}

std::vector<SweepRecord> sweep_threads(const SolveRequest& base,
                                       std::vector<int> thread_counts,
                                       SpawnMode mode, int repetitions,
                                       int warmups, std::size_t pad_stride) {
  if (thread_counts.empty()) {
    throw InputDomainError("thread sweep needs at least one thread count");
  }
  std::sort(thread_counts.begin(), thread_counts.end());
  thread_counts.erase(std::unique(thread_counts.begin(), thread_counts.end()),
                      thread_counts.end());
  for (int t : thread_counts) (void)depth_for_threads(t);  // fail before timing

  const int iterations = base.budget.resolve(base.interval);
  std::vector<SweepRecord> records;
  records.reserve(thread_counts.size());
  for (int t : thread_counts) {
    std::optional<RunaheadConfig> cfg;
    if (t != 1) cfg = RunaheadConfig{t, mode, pad_stride};
    TimedSolve ts = time_solve(base, cfg, repetitions, warmups);
    records.push_back({base.fn, base.interval, iterations, t, mode,
                       std::move(ts.measurement), 0, 0, ts.digest});
  }
  for (const auto& r : records) {
    if (!(r.digest == records.front().digest)) {
      throw ResultInstabilityError(
          "thread counts disagree on the result digest");
    }
  }
  derive_columns(records);
  return records;
}

std::vector<SweepRecord> sweep_latency(const SolveRequest& base,
                                       std::vector<int> terms_list, int threads,
                                       SpawnMode mode, int repetitions,
                                       int warmups, std::size_t pad_stride) {
  if (terms_list.empty()) {
    throw InputDomainError("latency sweep needs at least one term count");
  }
  std::sort(terms_list.begin(), terms_list.end());
  terms_list.erase(std::unique(terms_list.begin(), terms_list.end()),
                   terms_list.end());
  for (int terms : terms_list) {
    if (terms < 1) throw InputDomainError("Taylor term count must be >= 1");
  }
  (void)depth_for_threads(threads);

  const int iterations = base.budget.resolve(base.interval);
  std::vector<SweepRecord> records;
  for (int terms : terms_list) {
    SolveRequest req = base;
    req.fn.taylor.terms = terms;
    TimedSolve serial = time_solve(req, std::nullopt, repetitions, warmups);
    records.push_back({req.fn, req.interval, iterations, 1, mode,
                       serial.measurement, 0, 0, serial.digest});
    if (threads != 1) {
      TimedSolve par = time_solve(req, RunaheadConfig{threads, mode, pad_stride},
                                  repetitions, warmups);
      if (!(par.digest == serial.digest)) {
        throw ResultInstabilityError(
            "thread team disagrees with the serial result at " +
            std::to_string(terms) + " terms");
      }
      records.push_back({req.fn, req.interval, iterations, threads, mode,
                         std::move(par.measurement), 0, 0, par.digest});
    }
  }
  derive_columns(records);

  std::vector<SweepRecord> out;
  out.reserve(terms_list.size());
  for (auto& r : records) {
    if (r.threads == threads) out.push_back(std::move(r));
  }
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> monotone_cost_violations(
    const std::vector<SweepRecord>& records) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i + 1 < records.size(); ++i) {
    const SweepRecord& a = records[i];
    const SweepRecord& b = records[i + 1];
    if (b.fn.taylor.terms <= a.fn.taylor.terms) continue;
    if (b.measurement.median_ns < a.measurement.median_ns * 0.95) {
      out.emplace_back(i, i + 1);
    }
  }
  return out;
}

}  // namespace runbisect
