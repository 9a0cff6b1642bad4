#pragma once

#include <string>

namespace runbisect {

// Number of Taylor terms summed per trigonometric call. This is the tunable
// cost knob of the whole benchmark: evaluation time is linear in `terms`,
// and every term is summed even once it underflows to zero.
struct TaylorConfig {
  int terms = 10000;
};

enum class FunctionFamily {
  SinOfCos,     // f(x) = sin(cos(x)), both factors via truncated Taylor series
  SinTwoX,      // f(x) = sin(2x) via truncated Taylor series
  LinearShift,  // f(x) = x - c, exact; lets tests place roots on midpoints
};

struct TargetFunction {
  FunctionFamily family = FunctionFamily::SinOfCos;
  TaylorConfig taylor{};
  double shift = 0.0;  // LinearShift only
};

TargetFunction make_sin_of_cos(int terms = 10000);
TargetFunction make_sin_two_x(int terms = 10000);
TargetFunction make_linear_shift(double c);

// Parses "sin-of-cos", "sin-2x" or "linear:C" (C a finite real).
// Throws InputDomainError on anything else.
TargetFunction parse_function(const std::string& name, int terms);

// Inverse of parse_function; reals rendered with 17 significant digits.
std::string function_name(const TargetFunction& fn);

// Sign convention used throughout the solvers and the sign board:
// Negative iff v < 0, so an exact zero counts as NonNegative. Enum values
// double as the board digits ('1' marks a negative evaluation).
enum class Sign : unsigned char { NonNegative = 0, Negative = 1 };

constexpr int sign_digit(Sign s) { return static_cast<int>(s); }

Sign sign_of(double v);

// Truncated Maclaurin series, summed by term recurrence (no factorials):
//   sin: term_0 = x,   term_{i+1} = term_i * (-x^2) / ((2i+2)(2i+3))
//   cos: term_0 = 1,   term_{i+1} = term_i * (-x^2) / ((2i+1)(2i+2))
// Exactly cfg.terms terms are summed; callers rely on the cost, not just the
// value. Throws InputDomainError for non-finite x or terms < 1.
double taylor_sin(double x, const TaylorConfig& cfg);
double taylor_cos(double x, const TaylorConfig& cfg);

// Evaluates fn at x. Deterministic: the same (fn, x) yields the bit-identical
// double on every call from every thread.
double evaluate(const TargetFunction& fn, double x);

}  // namespace runbisect
