#pragma once

#include <stdexcept>

namespace runbisect {

// Base class for everything this library throws on bad input or bad state.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An argument is outside the operation's domain (non-finite input,
// epsilon <= 0, zero Taylor terms, malformed interval, ...).
class InputDomainError : public Error {
 public:
  using Error::Error;
};

// f(a) and f(b) do not have opposite signs, so bisection cannot start.
class BracketError : public Error {
 public:
  using Error::Error;
};

// Invalid solver configuration (thread count, pad stride, mode combination).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A sweep's records lack the single-thread baseline needed to normalize.
class MissingAnchorError : public Error {
 public:
  using Error::Error;
};

// Timed repetitions of the same request disagreed on the solve result.
class ResultInstabilityError : public Error {
 public:
  using Error::Error;
};

// Writing rendered output failed.
class IoError : public Error {
 public:
  using Error::Error;
};

// Broken internal protocol state: bracket lost on the sign board, a round
// finished with unwritten slots, and similar conditions that indicate a bug
// rather than bad input.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace runbisect
