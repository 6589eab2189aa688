#ifndef SPLC_ERRORS_HPP
#define SPLC_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace splc {

/// Base class of every error thrown by this library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Query parameter lies outside the parametric domain.
class DomainError : public Error {
public:
  using Error::Error;
};

/// Malformed sizes, values, or geometric preconditions.
class ArgumentError : public Error {
public:
  using Error::Error;
};

/// Linear algebra failure; carries a condition-number estimate when known.
class NumericalError : public Error {
public:
  explicit NumericalError(const std::string& what, double condition_estimate = 0.0)
      : Error(what), condition_estimate_(condition_estimate) {}
  double condition_estimate() const noexcept { return condition_estimate_; }

private:
  double condition_estimate_;
};

/// Malformed file, frame, or padding layout.
class FormatError : public Error {
public:
  using Error::Error;
};

/// Violation of the coupling protocol (handshake order, version, roles).
class ProtocolError : public Error {
public:
  using Error::Error;
};

/// Byte-stream failure: disconnect, short read, socket error.
class TransportError : public Error {
public:
  using Error::Error;
};

/// Interface configuration the library deliberately does not handle.
class UnsupportedError : public Error {
public:
  using Error::Error;
};

/// Fixed-point iteration ran out of sub-iterations; keeps the residual history.
class ConvergenceError : public Error {
public:
  ConvergenceError(const std::string& what, std::vector<double> residual_history)
      : Error(what), residual_history_(std::move(residual_history)) {}
  const std::vector<double>& residual_history() const noexcept { return residual_history_; }

private:
  std::vector<double> residual_history_;
};

}  // namespace splc

#endif
