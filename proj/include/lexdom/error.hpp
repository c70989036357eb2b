#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lexdom {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A line-oriented input could not be parsed. `line()` is 1-based.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Hostname has no registrable domain (it is itself a public suffix, or empty).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Labels contain a single class, so no classifier can be fit or scored.
class DegenerateLabels : public Error {
 public:
  DegenerateLabels() : Error("degenerate labels: both classes are required") {}
};

/// Optimizer did not reach tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(double lambda, std::size_t iterations)
      : Error("coordinate descent did not converge at lambda=" + std::to_string(lambda) +
              " after " + std::to_string(iterations) + " iterations"),
        lambda_(lambda),
        iterations_(iterations) {}

  double lambda() const noexcept { return lambda_; }
  std::size_t iterations() const noexcept { return iterations_; }

 private:
  double lambda_;
  std::size_t iterations_;
};

/// A model and a feature space (or vector) do not belong together.
class FingerprintMismatch : public Error {
 public:
  using Error::Error;
};

/// Model or feature-space file could not be read back.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace lexdom
