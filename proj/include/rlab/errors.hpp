#pragma once

#include <stdexcept>
#include <string>

namespace rlab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Shape mismatch (non-square input, wrong block sizes).
class DimensionError : public Error {
public:
  using Error::Error;
};

/// Input outside the mathematical domain of an operation.
class DomainError : public Error {
public:
  using Error::Error;
};

/// A Cartan element sits on (or too close to) a chamber wall.
class RegularityError : public Error {
public:
  RegularityError(const std::string& what, std::string root, double margin,
                  double time = -1.0)
      : Error(what), root_(std::move(root)), margin_(margin), time_(time) {}

  const std::string& root() const noexcept { return root_; }
  double margin() const noexcept { return margin_; }
  /// Flow time of the breach, negative when not raised by a trajectory.
  double time() const noexcept { return time_; }

private:
  std::string root_;
  double margin_;
  double time_;
};

/// The M-component constraint xi^l_M + xi^r_M = 0 does not hold.
class ConstraintError : public Error {
public:
  using Error::Error;
};

/// Orbit parameters violate a case-specific consistency inequality.
class ConsistencyError : public Error {
public:
  using Error::Error;
};

/// A matrix factorization could not be carried out.
class FactorizationError : public Error {
public:
  using Error::Error;
};

/// Least-squares fit too ill-conditioned to trust.
class ConditioningError : public Error {
public:
  using Error::Error;
};

/// Malformed or inconsistent run configuration.
class ConfigError : public Error {
public:
  using Error::Error;
};

}  // namespace rlab
