#pragma once

#include <stdexcept>
#include <string>

namespace tmsq {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Operands live on different Hilbert spaces.
class SpaceMismatch : public Error {
 public:
  using Error::Error;
};

// Θ₁ = Θ₂: the squeeze parameter diverges.
class DegenerateChannel : public Error {
 public:
  using Error::Error;
};

// Fock truncation too small for the requested state or operator.
class TruncationError : public Error {
 public:
  TruncationError(const std::string& what, int suggested_truncation)
      : Error(what), suggested_(suggested_truncation) {}

  int suggested_truncation() const noexcept { return suggested_; }

 private:
  int suggested_;
};

class StepSizeError : public Error {
 public:
  StepSizeError(const std::string& what, double max_step)
      : Error(what), max_step_(max_step) {}

  double max_step() const noexcept { return max_step_; }

 private:
  double max_step_;
};

// Malformed configuration input; the message names the offending key.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace tmsq
