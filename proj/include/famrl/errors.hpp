#pragma once

#include <stdexcept>
#include <string>

namespace famrl {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Shapes of tables, policies or MDPs do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Input outside the mathematical domain of a function (e.g. a non-finite value).
class DomainError : public Error {
 public:
  using Error::Error;
};

class DivisionByZeroError : public Error {
 public:
  using Error::Error;
};

/// An iterative scheme did not reach its tolerance; carries the last residual.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double last_residual)
      : Error(what), last_residual_(last_residual) {}
  double last_residual() const noexcept { return last_residual_; }

 private:
  double last_residual_;
};

/// Values blew past the divergence guard.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// A behaviour probability of zero was used as an importance-ratio denominator.
class DegenerateProbabilityError : public Error {
 public:
  using Error::Error;
};

/// A stored transition sequence violates the replay schema.
class SchemaViolation : public Error {
 public:
  using Error::Error;
};

class ScheduleDomainError : public Error {
 public:
  using Error::Error;
};

/// An environment or component was driven outside its protocol.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

class UndefinedBaselineError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace famrl
