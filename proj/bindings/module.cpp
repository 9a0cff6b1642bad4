#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "runbisect/errors.hpp"
#include "runbisect/harness.hpp"
#include "runbisect/render.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace runbisect;

namespace {

Budget make_budget(const std::optional<int>& iterations,
                   const std::optional<double>& epsilon,
                   const std::optional<long>& epsilon_pow2) {
  const int provided = static_cast<int>(iterations.has_value()) +
                       static_cast<int>(epsilon.has_value()) +
                       static_cast<int>(epsilon_pow2.has_value());
  if (provided > 1) {
    throw ConfigError(
        "pass at most one of iterations, epsilon, epsilon_pow2");
  }
  if (iterations.has_value()) return Budget::iterations(*iterations);
  if (epsilon.has_value()) return Budget::epsilon(*epsilon);
  if (epsilon_pow2.has_value()) return Budget::epsilon_pow2(*epsilon_pow2);
  return Budget::epsilon_pow2(-6);
}

std::string interval_repr(const Interval& iv) {
  return "Interval(" + format_real(iv.a()) + ", " + format_real(iv.b()) + ")";
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Bisection root finding: a serial baseline and a speculative runahead "
      "solver whose thread teams evaluate several halving levels per round";

  // Validation problems become ValueError; everything else keeps the default
  // mapping (the error hierarchy derives from std::runtime_error).
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ConfigError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const InputDomainError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  py::class_<Interval>(m, "Interval",
                       "A bracketing interval (a, b) with a < b, both finite")
      .def(py::init<double, double>(), "a"_a, "b"_a)
      .def_property_readonly("a", &Interval::a)
      .def_property_readonly("b", &Interval::b)
      .def_property_readonly("width", &Interval::width)
      .def_property_readonly("midpoint", &Interval::midpoint)
      .def("__eq__",
           [](const Interval& lhs, const Interval& rhs) { return lhs == rhs; })
      .def("__repr__", &interval_repr);

  py::class_<TargetFunction>(m, "TargetFunction",
                             "One of the benchmark functions: sin-of-cos, "
                             "sin-2x (Taylor evaluated) or linear:C")
      .def_property_readonly(
          "name", [](const TargetFunction& f) { return function_name(f); })
      .def_property_readonly(
          "taylor_terms",
          [](const TargetFunction& f) { return f.taylor.terms; })
      .def("__repr__", [](const TargetFunction& f) {
        return "<TargetFunction " + function_name(f) +
               " terms=" + std::to_string(f.taylor.terms) + ">";
      });

  py::class_<SolveResult>(m, "SolveResult")
      .def_readonly("root", &SolveResult::root)
      .def_readonly("iterations_executed", &SolveResult::iterations_executed)
      .def_readonly("final_interval", &SolveResult::final_interval)
      .def_readonly("evaluations", &SolveResult::evaluations)
      .def("__repr__", [](const SolveResult& r) {
        return "<SolveResult root=" + format_real(r.root) + " interval=" +
               interval_repr(r.final_interval) + " iterations=" +
               std::to_string(r.iterations_executed) + ">";
      });

  py::class_<SweepRecord>(m, "SweepRecord")
      .def_property_readonly(
          "function", [](const SweepRecord& r) { return function_name(r.fn); })
      .def_property_readonly(
          "taylor_terms",
          [](const SweepRecord& r) { return r.fn.taylor.terms; })
      .def_readonly("interval", &SweepRecord::interval)
      .def_readonly("iterations", &SweepRecord::iterations)
      .def_readonly("threads", &SweepRecord::threads)
      .def_property_readonly(
          "spawn_mode",
          [](const SweepRecord& r) { return spawn_mode_name(r.spawn_mode); })
      .def_property_readonly(
          "median_ns",
          [](const SweepRecord& r) { return r.measurement.median_ns; })
      .def_property_readonly(
          "repetitions",
          [](const SweepRecord& r) { return r.measurement.repetitions; })
      .def_readonly("normalized_latency", &SweepRecord::normalized_latency)
      .def_readonly("speedup", &SweepRecord::speedup)
      .def_property_readonly(
          "root", [](const SweepRecord& r) { return r.digest.root; })
      .def_property_readonly(
          "final_a", [](const SweepRecord& r) { return r.digest.final_a; })
      .def_property_readonly(
          "final_b", [](const SweepRecord& r) { return r.digest.final_b; })
      .def("__repr__", [](const SweepRecord& r) {
        return "<SweepRecord " + function_name(r.fn) + " terms=" +
               std::to_string(r.fn.taylor.terms) + " threads=" +
               std::to_string(r.threads) + " speedup=" + format_real(r.speedup) +
               ">";
      });

  m.def(
      "make_function",
      [](const std::string& name, int terms) {
        return parse_function(name, terms);
      },
      "name"_a, "terms"_a = 10000,
      "Parse a function spec: 'sin-of-cos', 'sin-2x' or 'linear:C'");
  m.def("make_sin_of_cos", &make_sin_of_cos, "terms"_a = 10000);
  m.def("make_sin_two_x", &make_sin_two_x, "terms"_a = 10000);
  m.def("make_linear_shift", &make_linear_shift, "c"_a);
  m.def("evaluate", &evaluate, "fn"_a, "x"_a,
        "Evaluate a target function at x (Taylor series for the sine family)");

  py::class_<TaylorConfig>(m, "TaylorConfig")
      .def(py::init([](int terms) { return TaylorConfig{terms}; }),
           "terms"_a = 10000)
      .def_readonly("terms", &TaylorConfig::terms);

  m.def("taylor_sin", &taylor_sin, "x"_a, "config"_a = TaylorConfig{},
        "Truncated Taylor sine");
  m.def("taylor_cos", &taylor_cos, "x"_a, "config"_a = TaylorConfig{},
        "Truncated Taylor cosine");

  m.def("required_iterations", &required_iterations, "interval"_a, "epsilon"_a,
        "Halving levels needed to bring the interval width to epsilon or less");
  m.def("required_iterations_pow2", &required_iterations_pow2, "interval"_a,
        "exponent"_a,
        "Same, with epsilon given as the exact power 2^exponent (works far "
        "beyond double range, e.g. exponent=-2520)");
  m.def("rounds_required", &rounds_required, "iterations"_a, "depth"_a,
        "ceil(iterations / depth): speculative rounds needed");
  m.def("depth_for_threads", &depth_for_threads, "threads"_a,
        "Speculation depth k for a team of 2^k - 1 threads; raises ValueError "
        "naming the valid neighbors otherwise");

  m.def(
      "bisect_serial",
      [](const TargetFunction& fn, const Interval& interval,
         const std::optional<int>& iterations,
         const std::optional<double>& epsilon,
         const std::optional<long>& epsilon_pow2, bool literal_alg1) {
        SerialOptions opt;
        opt.literal_alg1 = literal_alg1;
        return bisect_serial(
            {fn, interval, make_budget(iterations, epsilon, epsilon_pow2)},
            opt);
      },
      "fn"_a, "interval"_a, py::kw_only(), "iterations"_a = py::none(),
      "epsilon"_a = py::none(), "epsilon_pow2"_a = py::none(),
      "literal_alg1"_a = false, py::call_guard<py::gil_scoped_release>(),
      "Serial bisection; default budget is epsilon 2^-6");

  m.def(
      "bisect_runahead",
      [](const TargetFunction& fn, const Interval& interval, int threads,
         const std::string& spawn_mode, std::size_t pad_stride,
         const std::optional<int>& iterations,
         const std::optional<double>& epsilon,
         const std::optional<long>& epsilon_pow2) {
        const RunaheadConfig cfg{threads, parse_spawn_mode(spawn_mode),
                                 pad_stride};
        return bisect_runahead(
            {fn, interval, make_budget(iterations, epsilon, epsilon_pow2)},
            cfg);
      },
      "fn"_a, "interval"_a, "threads"_a, py::kw_only(),
      "spawn_mode"_a = "persistent", "pad_stride"_a = std::size_t{128},
      "iterations"_a = py::none(), "epsilon"_a = py::none(),
      "epsilon_pow2"_a = py::none(), py::call_guard<py::gil_scoped_release>(),
      "Runahead bisection with a team of 2^k - 1 threads; bit-identical to "
      "bisect_serial on the same instance");

  m.def(
      "sweep_threads",
      [](const TargetFunction& fn, const Interval& interval,
         const std::vector<int>& thread_counts, const std::string& spawn_mode,
         int reps, int warmups, std::size_t pad_stride,
         const std::optional<int>& iterations,
         const std::optional<double>& epsilon,
         const std::optional<long>& epsilon_pow2) {
        return sweep_threads(
            {fn, interval, make_budget(iterations, epsilon, epsilon_pow2)},
            thread_counts, parse_spawn_mode(spawn_mode), reps, warmups,
            pad_stride);
      },
      "fn"_a, "interval"_a, "thread_counts"_a, py::kw_only(),
      "spawn_mode"_a = "persistent", "reps"_a = 5, "warmups"_a = 1,
      "pad_stride"_a = std::size_t{128}, "iterations"_a = py::none(),
      "epsilon"_a = py::none(), "epsilon_pow2"_a = py::none(),
      py::call_guard<py::gil_scoped_release>(),
      "Time one instance across team sizes; the single-thread row anchors the "
      "normalized columns");

  m.def(
      "sweep_latency",
      [](const TargetFunction& fn, const Interval& interval,
         const std::vector<int>& terms_list, int threads,
         const std::string& spawn_mode, int reps, int warmups,
         std::size_t pad_stride, const std::optional<int>& iterations,
         const std::optional<double>& epsilon,
         const std::optional<long>& epsilon_pow2) {
        return sweep_latency(
            {fn, interval, make_budget(iterations, epsilon, epsilon_pow2)},
            terms_list, threads, parse_spawn_mode(spawn_mode), reps, warmups,
            pad_stride);
      },
      "fn"_a, "interval"_a, "terms_list"_a, "threads"_a, py::kw_only(),
      "spawn_mode"_a = "persistent", "reps"_a = 5, "warmups"_a = 1,
      "pad_stride"_a = std::size_t{128}, "iterations"_a = py::none(),
      "epsilon"_a = py::none(), "epsilon_pow2"_a = py::none(),
      py::call_guard<py::gil_scoped_release>(),
      "Time one instance across Taylor term counts at a fixed team size, each "
      "row normalized against its own serial run");

  m.attr("CSV_HEADER") = kCsvHeader;
  m.def(
      "render_csv",
      [](const std::vector<SweepRecord>& records) {
        return render(records, RenderFormat::Csv);
      },
      "records"_a, "Render sweep records as CSV under CSV_HEADER");
  m.def(
      "render_table",
      [](const std::vector<SweepRecord>& records) {
        return render(records, RenderFormat::Table);
      },
      "records"_a, "Render sweep records as an aligned table");
  m.def("format_real", &format_real, "value"_a,
        "17-significant-digit rendering that strtod/float() recovers exactly");
}
