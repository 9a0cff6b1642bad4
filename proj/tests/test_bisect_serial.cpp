#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "runbisect/bisect.hpp"
#include "runbisect/errors.hpp"

using namespace runbisect;

namespace {

// Independent oracle: a direct transliteration of the textbook loop, with
// f(a) re-evaluated every iteration and the branch written out as the
// real-number reading of `f(a) * f(root) < 0` (strictly opposite nonzero
// signs). Results are frozen against this before being compared with the
// library implementation.
struct OracleResult {
  double root;
  double a;
  double b;
};

template <typename F>
OracleResult oracle_bisect(F f, double a, double b, int n) {
  double root = (a + b) / 2;
  for (int i = 0; i < n; ++i) {
    root = (a + b) / 2;
    const double fa = f(a);
    const double froot = f(root);
    const bool product_negative = (fa < 0 && froot > 0) || (fa > 0 && froot < 0);
    if (product_negative) {
      b = root;
    } else {
      a = root;
    }
  }
  return {root, a, b};
}

double eval_fn(const TargetFunction& fn, double x) { return evaluate(fn, x); }

}  // namespace

TEST_CASE("interval validation") {
  CHECK_THROWS_AS(Interval(2.0, 2.0), InputDomainError);
  CHECK_THROWS_AS(Interval(3.0, 1.0), InputDomainError);
  CHECK_THROWS_AS(Interval(std::nan(""), 1.0), InputDomainError);
  CHECK_THROWS_AS(Interval(0.0, std::numeric_limits<double>::infinity()),
                  InputDomainError);
  const Interval iv(1.0, 2.0);
  CHECK(iv.width() == 1.0);
  CHECK(iv.midpoint() == 1.5);
}

TEST_CASE("required_iterations: exact ceil(log2) by halving") {
  CHECK(required_iterations(Interval(2, 4), 2.0) == 0);
  CHECK(required_iterations(Interval(1, 2), std::ldexp(1.0, -6)) == 6);
  CHECK(required_iterations(Interval(1, 2), 1.0) == 0);
  CHECK(required_iterations(Interval(0, 1), 0.3) == 2);  // ceil(log2(1/0.3)) = 2
  CHECK_THROWS_AS(required_iterations(Interval(1, 2), 0.0), InputDomainError);
  CHECK_THROWS_AS(required_iterations(Interval(1, 2), -0.5), InputDomainError);
  CHECK_THROWS_AS(
      required_iterations(Interval(1, 2), std::numeric_limits<double>::infinity()),
      InputDomainError);
}

TEST_CASE("required_iterations_pow2 handles tolerances beyond double range") {
  CHECK(required_iterations_pow2(Interval(1, 2), -6) == 6);
  CHECK(required_iterations_pow2(Interval(1, 2), -2520) == 2520);
  CHECK(required_iterations_pow2(Interval(2, 4), 1) == 0);   // eps = 2, width 2
  CHECK(required_iterations_pow2(Interval(2, 4), 0) == 1);   // eps = 1
  CHECK(required_iterations_pow2(Interval(0, 1), -2520) == 2520);
  CHECK(required_iterations_pow2(Interval(1, 2), 4) == 0);
}

TEST_CASE("required_iterations: double path and pow2 path agree where both apply") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> wexp(-8, 8);
  std::uniform_int_distribution<int> eexp(-60, 8);
  for (int i = 0; i < 500; ++i) {
    const double w = std::ldexp(1.0, wexp(rng));
    const Interval iv(0.0, w);
    const int e = eexp(rng);
    CHECK(required_iterations(iv, std::ldexp(1.0, e)) ==
          required_iterations_pow2(iv, e));
  }
  // Non-power-of-two widths against the mathematical definition.
  std::uniform_real_distribution<double> wid(1e-3, 1e3);
  std::uniform_real_distribution<double> eps(1e-9, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const double w = wid(rng);
    const double e = eps(rng);
    const Interval iv(1.0, 1.0 + w);
    const int n = required_iterations(iv, e);
    const double w_exact = iv.width();
    if (n == 0) {
      CHECK(w_exact <= e);
    } else {
      CHECK(std::ldexp(w_exact, -n) <= e);
      CHECK(std::ldexp(w_exact, -(n - 1)) > e);
    }
  }
}

TEST_CASE("budget resolution") {
  const Interval iv(1, 2);
  CHECK(Budget::iterations(9).resolve(iv) == 9);
  CHECK(Budget::iterations(0).resolve(iv) == 0);
  CHECK(Budget::epsilon(std::ldexp(1.0, -6)).resolve(iv) == 6);
  CHECK(Budget::epsilon_pow2(-2520).resolve(iv) == 2520);
  CHECK_THROWS_AS(Budget::iterations(-1).resolve(iv), InputDomainError);
  CHECK_THROWS_AS(Budget::epsilon(0.0).resolve(iv), InputDomainError);
}

TEST_CASE("worked example: sin(2x) on (2,4), two iterations") {
  const TargetFunction fn = make_sin_two_x(50);
  const OracleResult expect =
      oracle_bisect([&](double x) { return eval_fn(fn, x); }, 2.0, 4.0, 2);
  CHECK(expect.root == 3.5);
  CHECK(expect.a == 3.0);
  CHECK(expect.b == 3.5);

  const SolveResult r = bisect_serial({fn, Interval(2, 4), Budget::iterations(2)});
  CHECK(r.root == 3.5);
  CHECK(r.final_interval == Interval(3.0, 3.5));
  CHECK(r.iterations_executed == 2);
  CHECK(r.evaluations == 4);  // two admission evaluations + one per iteration
}

TEST_CASE("worked example: sin(cos(x)) on (1,2), six iterations") {
  const TargetFunction fn = make_sin_of_cos(50);
  const OracleResult expect =
      oracle_bisect([&](double x) { return eval_fn(fn, x); }, 1.0, 2.0, 6);
  CHECK(expect.root == 1.578125);
  CHECK(expect.a == 1.5625);
  CHECK(expect.b == 1.578125);

  const SolveResult r = bisect_serial({fn, Interval(1, 2), Budget::iterations(6)});
  CHECK(r.root == 1.578125);
  CHECK(r.final_interval == Interval(1.5625, 1.578125));
  // The bracket still straddles the sign change around pi/2.
  CHECK(r.final_interval.a() < 1.5707964);
  CHECK(r.final_interval.b() > 1.5707963);
  CHECK(r.evaluations == 8);
}

TEST_CASE("zero at the midpoint takes the else branch (a moves)") {
  // f(x) = x - 0.5 on (0,1): midpoints 0.5 (f exactly 0), 0.75, 0.875; every
  // product is 0 or positive, so all three steps move `a`.
  const TargetFunction fn = make_linear_shift(0.5);
  const OracleResult expect =
      oracle_bisect([&](double x) { return eval_fn(fn, x); }, 0.0, 1.0, 3);
  CHECK(expect.root == 0.875);
  CHECK(expect.a == 0.875);
  CHECK(expect.b == 1.0);

  std::vector<SerialStep> steps;
  SerialOptions opt;
  opt.observer = [&](const SerialStep& s) { steps.push_back(s); };
  const SolveResult r =
      bisect_serial({fn, Interval(0, 1), Budget::iterations(3)}, opt);

  REQUIRE(steps.size() == 3);
  CHECK(steps[0].midpoint == 0.5);
  CHECK(steps[0].f_midpoint == 0.0);
  CHECK(steps[0].midpoint_sign == Sign::NonNegative);
  CHECK_FALSE(steps[0].kept_left);
  CHECK(steps[0].after == Interval(0.5, 1.0));
  CHECK(steps[1].midpoint == 0.75);
  CHECK_FALSE(steps[1].kept_left);
  CHECK(steps[2].midpoint == 0.875);
  CHECK_FALSE(steps[2].kept_left);

  CHECK(r.root == 0.875);
  CHECK(r.final_interval == Interval(0.875, 1.0));
}

TEST_CASE("solve_to_tolerance") {
  SUBCASE("epsilon 2^-6 on (1,2) runs six iterations") {
    const TargetFunction fn = make_sin_of_cos(50);
    const SolveResult r = solve_to_tolerance(fn, Interval(1, 2), std::ldexp(1.0, -6));
    const SolveResult direct =
        bisect_serial({fn, Interval(1, 2), Budget::iterations(6)});
    CHECK(digest(r) == digest(direct));
    CHECK(r.iterations_executed == 6);
  }
  SUBCASE("epsilon 0.5 on (2,4) needs n = 2") {
    const TargetFunction fn = make_sin_two_x(50);
    const SolveResult r = solve_to_tolerance(fn, Interval(2, 4), 0.5);
    CHECK(r.iterations_executed == 2);
    CHECK(r.final_interval == Interval(3.0, 3.5));
  }
  SUBCASE("width already within tolerance: zero iterations, midpoint sentinel") {
    const TargetFunction fn = make_linear_shift(0.5);
    const SolveResult r = solve_to_tolerance(fn, Interval(0, 1), 1.0);
    CHECK(r.iterations_executed == 0);
    CHECK(r.root == 0.5);
    CHECK(r.final_interval == Interval(0.0, 1.0));
    CHECK(r.evaluations == 2);  // admission check still runs
  }
}

TEST_CASE("bracket admission") {
  CHECK_THROWS_AS(
      bisect_serial({make_sin_of_cos(50), Interval(2, 4), Budget::iterations(3)}),
      BracketError);
  CHECK_THROWS_AS(
      bisect_serial({make_linear_shift(5.0), Interval(0, 1), Budget::iterations(3)}),
      BracketError);
  // Error text names the offending signs.
  try {
    bisect_serial({make_sin_of_cos(50), Interval(2, 4), Budget::iterations(3)});
    FAIL("expected BracketError");
  } catch (const BracketError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("sign") != std::string::npos);
  }
}

TEST_CASE("evaluation accounting: cached vs literal mode") {
  const TargetFunction fn = make_sin_two_x(50);
  for (int n : {0, 1, 2, 5, 13}) {
    CAPTURE(n);
    const SolveRequest req{fn, Interval(2, 4), Budget::iterations(n)};
    const SolveResult cached = bisect_serial(req);
    SerialOptions literal;
    literal.literal_alg1 = true;
    const SolveResult lit = bisect_serial(req, literal);
    CHECK(cached.evaluations == n + 2);
    CHECK(lit.evaluations == 2 * n + 2);
    CHECK(digest(cached) == digest(lit));  // same decisions, more work
  }
}

TEST_CASE("structural invariants on random zero-free instances") {
  std::mt19937_64 rng(20240818);
  std::uniform_int_distribution<int> pick_i(-64, 63);
  std::uniform_int_distribution<int> pick_m(1, 64);
  std::uniform_int_distribution<int> pick_n(1, 45);
  std::uniform_real_distribution<double> pick_u(0.05, 0.95);

  for (int trial = 0; trial < 30; ++trial) {
    const double a = pick_i(rng) / 16.0;
    const double w = pick_m(rng) / 16.0;
    const double b = a + w;
    const int n = pick_n(rng);
    // Random interior root; a random real almost surely misses every midpoint.
    const double c = a + w * pick_u(rng);
    const TargetFunction fn = make_linear_shift(c);
    CAPTURE(a);
    CAPTURE(b);
    CAPTURE(n);
    CAPTURE(c);

    const SolveRequest req{fn, Interval(a, b), Budget::iterations(n)};
    const SolveResult r = bisect_serial(req);

    // Width halves exactly every iteration.
    CHECK(r.final_interval.width() == std::ldexp(Interval(a, b).width(), -n));
    // The root is an endpoint of the final bracket.
    CHECK((r.root == r.final_interval.a() || r.root == r.final_interval.b()));
    // The true root stays bracketed, so |root - c| is within the final width.
    CHECK(std::abs(r.root - c) <= std::ldexp(w, -n));
    CHECK(r.final_interval.a() <= c);
    CHECK(c <= r.final_interval.b());
    // Bracketing is preserved under the sign convention.
    CHECK(sign_of(evaluate(fn, r.final_interval.a())) !=
          sign_of(evaluate(fn, r.final_interval.b())));
    // Nesting: one more iteration refines the same bracket.
    const SolveResult deeper =
        bisect_serial({fn, Interval(a, b), Budget::iterations(n + 1)});
    CHECK(deeper.final_interval.a() >= r.final_interval.a());
    CHECK(deeper.final_interval.b() <= r.final_interval.b());
    // And the oracle agrees step for step.
    const OracleResult expect =
        oracle_bisect([&](double x) { return eval_fn(fn, x); }, a, b, n);
    CHECK(r.root == expect.root);
    CHECK(r.final_interval.a() == expect.a);
    CHECK(r.final_interval.b() == expect.b);
  }
}

TEST_CASE("zero-iteration budget returns the midpoint sentinel") {
  const TargetFunction fn = make_sin_two_x(50);
  const SolveResult r = bisect_serial({fn, Interval(2, 4), Budget::iterations(0)});
  CHECK(r.root == 3.0);
  CHECK(r.iterations_executed == 0);
  CHECK(r.final_interval == Interval(2.0, 4.0));
  CHECK(r.evaluations == 2);
}

TEST_CASE("observer reports a consistent chain") {
  const TargetFunction fn = make_sin_of_cos(50);
  std::vector<SerialStep> steps;
  SerialOptions opt;
  opt.observer = [&](const SerialStep& s) { steps.push_back(s); };
  const SolveResult r =
      bisect_serial({fn, Interval(1, 2), Budget::iterations(6)}, opt);
  REQUIRE(steps.size() == 6);
  CHECK(steps.front().before == Interval(1.0, 2.0));
  for (std::size_t i = 0; i < steps.size(); ++i) {
    CHECK(steps[i].index == static_cast<int>(i) + 1);
    CHECK(steps[i].midpoint == steps[i].before.midpoint());
    CHECK(steps[i].midpoint_sign == sign_of(steps[i].f_midpoint));
    if (i + 1 < steps.size()) CHECK(steps[i].after == steps[i + 1].before);
  }
  CHECK(steps.back().after == r.final_interval);
  CHECK(steps.back().midpoint == r.root);
}
