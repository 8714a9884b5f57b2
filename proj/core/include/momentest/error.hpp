#pragma once

#include <stdexcept>
#include <string>

namespace momentest {

/// Argument outside the domain of a mathematical function.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Sample or point rejected by validation (shape, size, or support).
class SampleError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Point or observation outside the support of the distribution.
class SupportError : public SampleError {
 public:
  using SampleError::SampleError;
};

/// Invalid distribution parameters.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Moment identifier not available in the closed-form catalogs.
class CatalogError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Inconsistent solver, sweep, or command configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical breakdown that valid inputs should never trigger.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Too few usable Monte Carlo replicates to form a statistic.
class InsufficientDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace momentest
