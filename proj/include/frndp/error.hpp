#pragma once

#include <stdexcept>
#include <string>

namespace frndp {

/// Base class for every recoverable failure raised by the solver suite.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Instance file does not match the schema. Carries the offending field.
class SchemaError : public Error {
 public:
  SchemaError(const std::string& location, const std::string& message)
      : Error(location + ": " + message), location_(location) {}

  const std::string& location() const noexcept { return location_; }

 private:
  std::string location_;
};

/// A positive-demand node has no open route to any exit.
class DisconnectedSource : public Error {
 public:
  explicit DisconnectedSource(int node)
      : Error("disconnected source: node " + std::to_string(node) +
              " cannot reach an exit through open arcs"),
        node_(node) {}

  int node() const noexcept { return node_; }

 private:
  int node_;
};

/// No FR or evacuee path exists where one is required.
class NoPathError : public Error {
 public:
  using Error::Error;
};

/// Exhaustive procedures refuse inputs above their size guard.
class SizeLimitExceeded : public Error {
 public:
  using Error::Error;
};

/// No feasible instance or solution exists for the given parameters
/// (generator redraws exhausted, no scorable seed, no incumbent).
class InfeasibleParameters : public Error {
 public:
  using Error::Error;
};

}  // namespace frndp
