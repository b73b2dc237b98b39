#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace crnldp {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An input file or built-in network could not be found or read.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Thrown when a Network violates its invariants; what() lists every violation.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& msg)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// R(P) is empty, so W(P) has no points.
class EmptyReactionSet : public Error {
 public:
  using Error::Error;
};

/// The direction has zero projection onto the support set.
class ZeroProjection : public Error {
 public:
  using Error::Error;
};

class NotInRP : public Error {
 public:
  using Error::Error;
};

class NegativeConcentration : public Error {
 public:
  using Error::Error;
};

/// The ODE solution left the configured l1 cap at time().
class BlowUp : public Error {
 public:
  BlowUp(double time, double norm)
      : Error("solution exceeded l1 cap at t = " + std::to_string(time) + " (|x|_1 = " +
              std::to_string(norm) + ")"),
        time_(time) {}

  double time() const { return time_; }

 private:
  double time_;
};

/// Toric coordinates are undefined at z = (1,...,1).
class UnitPoint : public Error {
 public:
  using Error::Error;
};

class RateVanishes : public Error {
 public:
  using Error::Error;
};

/// Generic numerical failure (non-convergence, bad input to a numerical routine).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace crnldp
