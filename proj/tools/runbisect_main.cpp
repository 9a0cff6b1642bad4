#include <cerrno>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "runbisect/errors.hpp"
#include "runbisect/harness.hpp"
#include "runbisect/render.hpp"

namespace {

using namespace runbisect;

double parse_real(const std::string& text, const std::string& what) {
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size() || errno == ERANGE) {
    throw InputDomainError("malformed " + what + " '" + text + "'");
  }
  return v;
}

Interval parse_interval_arg(const std::string& text) {
  const std::size_t comma = text.find(',');
  if (comma == std::string::npos || comma == 0 || comma + 1 == text.size()) {
    throw InputDomainError("malformed interval '" + text +
                           "': expected two reals as A,B");
  }
  const double a = parse_real(text.substr(0, comma), "interval endpoint");
  const double b = parse_real(text.substr(comma + 1), "interval endpoint");
  return Interval(a, b);
}

// Accepts a plain real ("0.015625") or an exact power of two ("2^-6"); the
// latter survives exponents far beyond double range (e.g. 2^-2520).
Budget parse_epsilon(const std::string& text) {
  if (text.rfind("2^", 0) == 0) {
    const std::string exp = text.substr(2);
    char* end = nullptr;
    errno = 0;
    const long e = std::strtol(exp.c_str(), &end, 10);
    if (exp.empty() || end != exp.c_str() + exp.size() || errno == ERANGE) {
      throw InputDomainError("malformed epsilon '" + text +
                             "': expected a real or 2^E with integer E");
    }
    return Budget::epsilon_pow2(e);
  }
  return Budget::epsilon(parse_real(text, "epsilon"));
}

struct CommandOpts {
  std::string function = "sin-of-cos";
  int terms = 10000;
  std::vector<int> terms_list = {10, 100, 1000, 10000};
  std::string interval = "1,2";
  std::string epsilon;
  int iterations = 0;
  int threads = 1;
  std::vector<int> thread_list = {1, 3, 7};
  std::string spawn = "persistent";
  std::size_t pad = 128;
  int reps = 5;
  int warmups = 1;
  std::string format = "table";
  std::string output;
  bool literal = false;

  CLI::Option* epsilon_opt = nullptr;
  CLI::Option* iterations_opt = nullptr;

  Budget budget() const {
    if (iterations_opt != nullptr && iterations_opt->count() > 0) {
      return Budget::iterations(iterations);
    }
    if (epsilon_opt != nullptr && epsilon_opt->count() > 0) {
      return parse_epsilon(epsilon);
    }
    return Budget::epsilon_pow2(-6);
  }
  RenderFormat render_format() const {
    return format == "csv" ? RenderFormat::Csv : RenderFormat::Table;
  }
};

// Flags shared by solve and both sweeps. `list_terms` switches --taylor-terms
// between the scalar (solve, sweep-threads) and the sweep list.
void add_shared_flags(CLI::App* cmd, CommandOpts& o, bool list_terms) {
  cmd->add_option("--function", o.function,
                  "Target function: sin-of-cos, sin-2x, or linear:C")
      ->capture_default_str();
  if (list_terms) {
    cmd->add_option("--taylor-terms", o.terms_list,
                    "Taylor term counts to sweep, ascending (comma separated)")
        ->delimiter(',')
        ->expected(1, -1);
  } else {
    cmd->add_option("--taylor-terms", o.terms,
                    "Taylor terms per sine/cosine evaluation")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
  }
  cmd->add_option("--interval", o.interval, "Bracketing interval as A,B")
      ->capture_default_str();
  o.epsilon_opt =
      cmd->add_option("--epsilon", o.epsilon,
                      "Target final width (a real, or 2^E for an exact power "
                      "of two); default 2^-6");
  o.iterations_opt =
      cmd->add_option("--iterations", o.iterations,
                      "Exact halving-level count (overrides --epsilon)")
          ->check(CLI::NonNegativeNumber);
  o.epsilon_opt->excludes(o.iterations_opt);
  o.iterations_opt->excludes(o.epsilon_opt);
  cmd->add_option("--spawn-mode", o.spawn,
                  "Worker lifetime: persistent (pool across rounds) or "
                  "per-round (create and join each round)")
      ->check(CLI::IsMember({"persistent", "per-round"}))
      ->capture_default_str();
  cmd->add_option("--pad-bytes", o.pad,
                  "Bytes reserved per sign-board slot (power of two)")
      ->capture_default_str();
  cmd->add_option("--reps", o.reps, "Timed repetitions per measurement")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--warmups", o.warmups, "Discarded warmup executions")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--format", o.format, "Output format")
      ->check(CLI::IsMember({"csv", "table"}))
      ->capture_default_str();
  cmd->add_option("--output", o.output,
                  "Write output to this file instead of standard output");
}

int run_solve(const CommandOpts& o) {
  const TargetFunction fn = parse_function(o.function, o.terms);
  const Interval iv = parse_interval_arg(o.interval);
  const Budget budget = o.budget();
  const SpawnMode mode = parse_spawn_mode(o.spawn);
  if (o.literal && o.threads != 1) {
    throw ConfigError("--literal-alg1 is a serial mode; it requires --threads 1");
  }
  const SolveRequest req{fn, iv, budget};
  const int n = budget.resolve(iv);

  std::vector<SweepRecord> records;
  if (o.threads == 1) {
    SerialOptions sopt;
    sopt.literal_alg1 = o.literal;
    TimedSolve ts = time_solve(req, std::nullopt, o.reps, o.warmups, sopt);
    records.push_back({fn, iv, n, 1, mode, std::move(ts.measurement), 1.0, 1.0,
                       ts.digest});
  } else {
    // A hidden single-thread anchor fills the normalized columns and checks
    // that the team reproduced the serial result exactly.
    const RunaheadConfig cfg{o.threads, mode, o.pad};
    cfg.validate();
    const TimedSolve anchor = time_solve(req, std::nullopt, o.reps, o.warmups);
    TimedSolve par = time_solve(req, cfg, o.reps, o.warmups);
    if (!(par.digest == anchor.digest)) {
      throw ResultInstabilityError(
          "thread team disagrees with the serial result");
    }
    const double norm =
        par.measurement.median_ns / anchor.measurement.median_ns;
    const double speedup =
        anchor.measurement.median_ns / par.measurement.median_ns;
    records.push_back({fn, iv, n, o.threads, mode, std::move(par.measurement),
                       norm, speedup, par.digest});
  }
  write_text(render(records, o.render_format()), o.output);
  return 0;
}

int run_sweep_threads(const CommandOpts& o) {
  const TargetFunction fn = parse_function(o.function, o.terms);
  const Interval iv = parse_interval_arg(o.interval);
  const SolveRequest req{fn, iv, o.budget()};
  const auto records =
      sweep_threads(req, o.thread_list, parse_spawn_mode(o.spawn), o.reps,
                    o.warmups, o.pad);
  write_text(render(records, o.render_format()), o.output);
  return 0;
}

int run_sweep_latency(const CommandOpts& o) {
  const TargetFunction fn = parse_function(o.function, 10000);
  const Interval iv = parse_interval_arg(o.interval);
  const SolveRequest req{fn, iv, o.budget()};
  const auto records =
      sweep_latency(req, o.terms_list, o.threads, parse_spawn_mode(o.spawn),
                    o.reps, o.warmups, o.pad);
  for (const auto& [lo, hi] : monotone_cost_violations(records)) {
    std::cerr << "warning: median time drops more than 5% from "
              << records[lo].fn.taylor.terms << " to "
              << records[hi].fn.taylor.terms
              << " terms; timings may be noisy\n";
  }
  write_text(render(records, o.render_format()), o.output);
  return 0;
}

const char* sign_label(Sign s) {
  return s == Sign::Negative ? "negative (digit 1)" : "non-negative (digit 0)";
}

std::string interval_text(const Interval& iv) {
  return "(" + format_real(iv.a()) + ", " + format_real(iv.b()) + ")";
}

int run_demo(const std::string& output) {
  std::ostringstream out;
  const TargetFunction fn = make_sin_two_x();
  const Interval start(2.0, 4.0);

  out << "Walkthrough: f(x) = sin(2x) on " << interval_text(start)
      << ", two halving levels.\n\n";

  out << "Signs at every point this walkthrough touches:\n";
  for (double x : {2.0, 3.0, 3.5, 4.0}) {
    const double v = evaluate(fn, x);
    out << "  f(" << format_real(x) << ") = " << format_real(v) << "  ->  "
        << sign_label(sign_of(v)) << "\n";
  }

  out << "\nSerial bisection, one level per step:\n";
  SerialOptions sopt;
  sopt.observer = [&out](const SerialStep& s) {
    out << "  step " << s.index << ": " << interval_text(s.before)
        << ", midpoint " << format_real(s.midpoint) << " is "
        << (s.midpoint_sign == Sign::Negative ? "negative" : "non-negative")
        << " -> keep the " << (s.kept_left ? "left" : "right") << " half "
        << interval_text(s.after) << "\n";
  };
  const SolveRequest req{fn, start, Budget::iterations(2)};
  const SolveResult serial = bisect_serial(req, sopt);
  out << "  after two steps: root " << format_real(serial.root)
      << ", interval " << interval_text(serial.final_interval) << "\n";

  out << "\nThe same two levels as one speculative round (3 threads):\n";
  const RoundObserver robs = [&out](const RoundEvent& e) {
    out << "  grid evaluated ahead: the three interior points of "
        << interval_text(e.before) << "\n";
    out << "  sign board [edge | grid | edge]: [";
    for (std::size_t i = 0; i < e.board.size(); ++i) {
      if (i > 0) out << ", ";
      out << e.board[i];
    }
    out << "]\n";
    out << "  descent over the board selects " << interval_text(e.after)
        << "\n";
  };
  const SolveResult par = bisect_runahead(req, RunaheadConfig{3}, robs);
  out << "  round result: root " << format_real(par.root) << ", interval "
      << interval_text(par.final_interval)
      << " -- identical to the serial steps, one rendezvous instead of two "
         "sequential evaluations\n";

  write_text(out.str(), output);
  return 0;
}

int dispatch(const CLI::App& app, const CommandOpts& solve_opts,
             const CommandOpts& st_opts, const CommandOpts& sl_opts,
             const std::string& demo_output) {
  try {
    if (app.got_subcommand("solve")) return run_solve(solve_opts);
    if (app.got_subcommand("sweep-threads")) return run_sweep_threads(st_opts);
    if (app.got_subcommand("sweep-latency")) return run_sweep_latency(sl_opts);
    return run_demo(demo_output);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const InputDomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Bisection root finding, serially or with speculative runahead rounds"};
  app.require_subcommand(1);

  CommandOpts solve_opts;
  CLI::App* solve_cmd = app.add_subcommand(
      "solve", "Solve one instance and report the timed result");
  add_shared_flags(solve_cmd, solve_opts, /*list_terms=*/false);
  solve_cmd
      ->add_option("--threads", solve_opts.threads,
                   "Team size (2^k - 1); above 1 a single-thread anchor also "
                   "runs to fill the normalized columns")
      ->capture_default_str();
  solve_cmd->add_flag("--literal-alg1", solve_opts.literal,
                      "Serial fidelity mode: re-evaluate f(a) every iteration "
                      "instead of caching it");

  CommandOpts st_opts;
  CLI::App* st_cmd = app.add_subcommand(
      "sweep-threads", "Time one instance across team sizes");
  add_shared_flags(st_cmd, st_opts, /*list_terms=*/false);
  st_cmd
      ->add_option("--threads", st_opts.thread_list,
                   "Team sizes to sweep (comma separated)")
      ->delimiter(',')
      ->expected(1, -1);

  CommandOpts sl_opts;
  CLI::App* sl_cmd = app.add_subcommand(
      "sweep-latency",
      "Time one instance across function costs (Taylor term counts)");
  add_shared_flags(sl_cmd, sl_opts, /*list_terms=*/true);
  sl_cmd
      ->add_option("--threads", sl_opts.threads,
                   "Team size for the parallel rows")
      ->capture_default_str();

  std::string demo_output;
  CLI::App* demo_cmd = app.add_subcommand(
      "demo-fig2",
      "Annotated two-level walkthrough of sin(2x) on (2,4): serial steps, "
      "then the same levels as one speculative round");
  demo_cmd->add_option("--output", demo_output,
                       "Write the walkthrough to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  return dispatch(app, solve_opts, st_opts, sl_opts, demo_output);
}
