#include "runbisect/bisect.hpp"

#include <cmath>
#include <string>

#include "runbisect/errors.hpp"

namespace runbisect {

Interval::Interval(double a, double b) : a_(a), b_(b) {
  if (!std::isfinite(a) || !std::isfinite(b)) {
    throw InputDomainError("interval endpoints must be finite");
  }
  if (!(a < b)) {
    throw InputDomainError("interval needs a < b, got [" + std::to_string(a) +
                           ", " + std::to_string(b) + "]");
  }
}

int required_iterations(const Interval& interval, double epsilon) {
  if (!(epsilon > 0) || !std::isfinite(epsilon)) {
    throw InputDomainError("epsilon must be a finite positive real");
  }
  // Halving a double only decrements the exponent, so this loop computes
  // ceil(log2(width/epsilon)) without any log round-off.
  double cur = interval.width();
  int n = 0;
  while (cur > epsilon) {
    cur /= 2;
    ++n;
  }
  return n;
}

int required_iterations_pow2(const Interval& interval, long exponent) {
  // width = m * 2^e with m in [0.5, 1). Solving width * 2^-n <= 2^exponent:
  //   m == 0.5 exactly: n = e - 1 - exponent
  //   otherwise:        n = e - exponent
  if (exponent < -1'000'000'000L || exponent > 1'000'000'000L) {
    throw InputDomainError("tolerance exponent out of range");
  }
  int e = 0;
  const double m = std::frexp(interval.width(), &e);
  const long n = (m == 0.5) ? (e - 1 - exponent) : (e - exponent);
  if (n <= 0) return 0;
  return static_cast<int>(n);
}

Budget Budget::iterations(int n) {
  Budget b;
  b.v_ = IterationBudget{n};
  return b;
}

Budget Budget::epsilon(double eps) {
  Budget b;
  b.v_ = EpsilonBudget{eps};
  return b;
}

Budget Budget::epsilon_pow2(long exponent) {
  Budget b;
  b.v_ = EpsilonPow2Budget{exponent};
  return b;
}

int Budget::resolve(const Interval& interval) const {
  if (const auto* it = std::get_if<IterationBudget>(&v_)) {
    if (it->n < 0) {
      throw InputDomainError("iteration budget must be >= 0");
    }
    return it->n;
  }
  if (const auto* eps = std::get_if<EpsilonBudget>(&v_)) {
    return required_iterations(interval, eps->epsilon);
  }
  return required_iterations_pow2(interval,
                                  std::get<EpsilonPow2Budget>(v_).exponent);
}

ResultDigest digest(const SolveResult& r) {
  return {r.root, r.final_interval.a(), r.final_interval.b()};
}

SolveResult bisect_serial(const SolveRequest& req, const SerialOptions& opt) {
  const int n = req.budget.resolve(req.interval);

  std::int64_t evals = 0;
  const auto f = [&](double x) {
    ++evals;
    return evaluate(req.fn, x);
  };

  double a = req.interval.a();
  double b = req.interval.b();
  double fa = f(a);
  const double fb = f(b);
  if (sign_of(fa) == sign_of(fb)) {
    throw BracketError("no bracket on [" + std::to_string(a) + ", " +
                       std::to_string(b) + "]: f has the same sign at both ends");
  }

  double root = (a + b) / 2;  // n = 0 reports the plain midpoint
  for (int i = 1; i <= n; ++i) {
    root = (a + b) / 2;
    const double froot = f(root);
    if (opt.literal_alg1) fa = f(a);  // textbook loop re-reads f(a) every pass
    // f(a) * f(root) < 0 in real arithmetic: strictly opposite nonzero signs.
    // Spelled via sign_of so a denormal-underflowing product cannot flip the
    // branch; exact zeros still take the else path, as the strict `<` reads.
    const bool keep_left =
        fa != 0.0 && froot != 0.0 && sign_of(fa) != sign_of(froot);
    const double prev_a = a;
    const double prev_b = b;
    if (keep_left) {
      b = root;
    } else {
      a = root;
      fa = froot;
    }
    if (opt.observer) {
      opt.observer({i, Interval(prev_a, prev_b), root, froot, sign_of(froot),
                    keep_left, Interval(a, b)});
    }
  }

  return {root, n, Interval(a, b), evals};
}

SolveResult solve_to_tolerance(const TargetFunction& fn, const Interval& interval,
                               double epsilon, const SerialOptions& opt) {
  return bisect_serial({fn, interval, Budget::epsilon(epsilon)}, opt);
}

}  // namespace runbisect
