#pragma once

#include <cstdint>
#include <functional>
#include <variant>

#include "runbisect/numerics.hpp"

namespace runbisect {

// Bracketing interval (a, b) with a < b, both finite.
class Interval {
 public:
  Interval(double a, double b);  // throws InputDomainError if not a valid bracket

  double a() const { return a_; }
  double b() const { return b_; }
  double width() const { return b_ - a_; }

  // The exact expression both solvers use, so callers comparing against
  // solver output stay bit-compatible.
  double midpoint() const { return (a_ + b_) / 2; }

  friend bool operator==(const Interval& x, const Interval& y) {
    return x.a_ == y.a_ && x.b_ == y.b_;
  }

 private:
  double a_;
  double b_;
};

// Iterations needed to guarantee final width <= epsilon: ceil(log2(width/eps)),
// 0 when the interval is already within tolerance. Computed by repeated exact
// halving, not a floating log, so power-of-two ratios are never off by one.
int required_iterations(const Interval& interval, double epsilon);

// Same contract with epsilon = 2^exponent. Covers tolerances far below what a
// double can represent (e.g. exponent = -2520); pure exponent arithmetic.
int required_iterations_pow2(const Interval& interval, long exponent);

struct IterationBudget {
  int n = 0;  // n >= 0; n = 0 degenerates to "report the midpoint"
};
struct EpsilonBudget {
  double epsilon = 0;
};
struct EpsilonPow2Budget {
  long exponent = 0;  // epsilon = 2^exponent
};

// Either an explicit iteration count or a tolerance converted through
// required_iterations at solve time.
class Budget {
 public:
  static Budget iterations(int n);
  static Budget epsilon(double eps);
  static Budget epsilon_pow2(long exponent);

  int resolve(const Interval& interval) const;

 private:
  Budget() = default;
  std::variant<IterationBudget, EpsilonBudget, EpsilonPow2Budget> v_;
};

struct SolveRequest {
  TargetFunction fn;
  Interval interval;
  Budget budget;
};

struct SolveResult {
  double root = 0;            // last midpoint evaluated (initial midpoint when n = 0)
  int iterations_executed = 0;
  Interval final_interval;
  std::int64_t evaluations = 0;  // calls to evaluate(), admission check included
};

// The part of a result that must be bit-identical across solver variants,
// repetitions and thread counts.
struct ResultDigest {
  double root = 0;
  double final_a = 0;
  double final_b = 0;

  friend bool operator==(const ResultDigest&, const ResultDigest&) = default;
};

ResultDigest digest(const SolveResult& r);

// One serial iteration, reported after the interval is updated.
struct SerialStep {
  int index = 0;  // 1-based
  Interval before;
  double midpoint = 0;
  double f_midpoint = 0;
  Sign midpoint_sign = Sign::NonNegative;
  bool kept_left = false;  // true: b := midpoint; false: a := midpoint
  Interval after;
};

using SerialObserver = std::function<void(const SerialStep&)>;

struct SerialOptions {
  // Re-evaluate f(a) every iteration exactly as the textbook loop reads,
  // instead of caching the value. Same decisions, 2n+2 evaluations.
  bool literal_alg1 = false;
  SerialObserver observer;
};

// Plain bisection: exactly n midpoint steps, no early exit. The branch test
// keeps the strict `f(a) * f(root) < 0` semantics (an exact zero moves `a`).
// Throws BracketError when sign_of(f(a)) == sign_of(f(b)).
SolveResult bisect_serial(const SolveRequest& req, const SerialOptions& opt = {});

// bisect_serial with the budget derived from epsilon.
SolveResult solve_to_tolerance(const TargetFunction& fn, const Interval& interval,
                               double epsilon, const SerialOptions& opt = {});

}  // namespace runbisect
