#ifndef WFEQ_ERRORS_HPP_
#define WFEQ_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace wfeq {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed or inconsistent input data (scenario files, bad field values).
class SchemaError : public Error {
public:
  explicit SchemaError(const std::string& msg) : Error(msg) {}
};

/// Collector network is not a radial tree.
class TopologyError : public SchemaError {
public:
  explicit TopologyError(const std::string& msg) : SchemaError(msg) {}
};

/// An iterative solver ran out of iterations.
class ConvergenceError : public Error {
public:
  ConvergenceError(const std::string& msg, double residual, int iterations)
      : Error(msg), residual(residual), iterations(iterations) {}
  double residual;
  int iterations;
};

/// Aggregation produced an infeasible equivalent (negative discriminant,
/// inconsistent cluster, voltage ordering violated).
class EquivalenceError : public Error {
public:
  explicit EquivalenceError(const std::string& msg) : Error(msg) {}
};

}  // namespace wfeq

#endif  // WFEQ_ERRORS_HPP_
