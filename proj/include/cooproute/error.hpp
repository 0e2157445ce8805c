#pragma once

#include <stdexcept>
#include <string>

namespace cooproute {

/// Base of every error the library raises. The CLI maps the subclasses onto
/// exit codes (config 2, infeasible 3, convergence 4).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or semantically invalid input (bad network, bad document).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Demands cannot be routed below capacity.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver produced nothing usable.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace cooproute
