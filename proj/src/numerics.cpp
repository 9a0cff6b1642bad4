#include "runbisect/numerics.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "runbisect/errors.hpp"

namespace runbisect {

namespace {

void check_taylor_args(double x, const TaylorConfig& cfg, const char* who) {
  if (!std::isfinite(x)) {
    throw InputDomainError(std::string(who) + ": argument must be finite");
  }
  if (cfg.terms < 1) {
    throw InputDomainError(std::string(who) + ": need at least one Taylor term");
  }
}

}  // namespace

TargetFunction make_sin_of_cos(int terms) {
  return {FunctionFamily::SinOfCos, TaylorConfig{terms}, 0.0};
}

TargetFunction make_sin_two_x(int terms) {
  return {FunctionFamily::SinTwoX, TaylorConfig{terms}, 0.0};
}

TargetFunction make_linear_shift(double c) {
  if (!std::isfinite(c)) {
    throw InputDomainError("linear shift must be finite");
  }
  return {FunctionFamily::LinearShift, TaylorConfig{1}, c};
}

TargetFunction parse_function(const std::string& name, int terms) {
  if (name == "sin-of-cos") return make_sin_of_cos(terms);
  if (name == "sin-2x") return make_sin_two_x(terms);
  const std::string prefix = "linear:";
  if (name.rfind(prefix, 0) == 0) {
    const std::string tail = name.substr(prefix.size());
    if (tail.empty()) {
      throw InputDomainError("linear function needs a shift, e.g. linear:0.5");
    }
    char* end = nullptr;
    const double c = std::strtod(tail.c_str(), &end);
    if (end != tail.c_str() + tail.size() || !std::isfinite(c)) {
      throw InputDomainError("bad linear shift '" + tail + "'");
    }
    TargetFunction fn = make_linear_shift(c);
    fn.taylor.terms = terms;
    return fn;
  }
  throw InputDomainError("unknown function '" + name +
                         "' (expected sin-of-cos, sin-2x or linear:C)");
}

std::string function_name(const TargetFunction& fn) {
  switch (fn.family) {
    case FunctionFamily::SinOfCos:
      return "sin-of-cos";
    case FunctionFamily::SinTwoX:
      return "sin-2x";
    case FunctionFamily::LinearShift: {
      char buf[48];
      std::snprintf(buf, sizeof buf, "linear:%.17g", fn.shift);
      return buf;
    }
  }
  throw InputDomainError("unknown function family");
}

Sign sign_of(double v) { return v < 0 ? Sign::Negative : Sign::NonNegative; }

double taylor_sin(double x, const TaylorConfig& cfg) {
  check_taylor_args(x, cfg, "taylor_sin");
  const double neg_x2 = -(x * x);
  double term = x;
  double sum = 0.0;
  for (int i = 0; i < cfg.terms; ++i) {
    sum += term;
    term *= neg_x2 / ((2.0 * i + 2.0) * (2.0 * i + 3.0));
  }
  return sum;
}

double taylor_cos(double x, const TaylorConfig& cfg) {
  check_taylor_args(x, cfg, "taylor_cos");
  const double neg_x2 = -(x * x);
  double term = 1.0;
  double sum = 0.0;
  for (int i = 0; i < cfg.terms; ++i) {
    sum += term;
    term *= neg_x2 / ((2.0 * i + 1.0) * (2.0 * i + 2.0));
  }
  return sum;
}

double evaluate(const TargetFunction& fn, double x) {
  if (!std::isfinite(x)) {
    throw InputDomainError("evaluate: argument must be finite");
  }
  switch (fn.family) {
    case FunctionFamily::SinOfCos:
      return taylor_sin(taylor_cos(x, fn.taylor), fn.taylor);
    case FunctionFamily::SinTwoX:
      return taylor_sin(2 * x, fn.taylor);
    case FunctionFamily::LinearShift:
      return x - fn.shift;
  }
  throw InputDomainError("unknown function family");
}

}  // namespace runbisect
