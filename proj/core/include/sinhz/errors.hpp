#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace sinhz {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the analyticity strip/cone of a map or model.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Evaluation exactly at (or numerically on) a pole.
class PoleError : public Error {
 public:
  using Error::Error;
};

// Caller violated a documented precondition (bad config, inconsistent data).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Level-curve tracing stopped; carries the last point that satisfied the level equation.
class TraceError : public Error {
 public:
  TraceError(const std::string& what, std::complex<double> last_good)
      : Error(what), last_good_(last_good) {}
  std::complex<double> last_good() const { return last_good_; }

 private:
  std::complex<double> last_good_;
};

// An iterative/adaptive procedure exhausted its budget.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace sinhz
