#pragma once

#include <stdexcept>
#include <string>

namespace fadstat {

// Invalid value passed when constructing a parameter record.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Argument lies outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Requested tolerance was not reached within the term/node budget.
// Carries the partial result so callers can decide what to do with it.
class AccuracyError : public std::runtime_error {
 public:
  AccuracyError(const std::string& msg, double partial, double err_est)
      : std::runtime_error(msg), partial_value(partial), abs_err_est(err_est) {}
  double partial_value;
  double abs_err_est;
};

// The requested evaluation route is degenerate for these inputs; the caller
// should switch to the alternative route named in the message.
class DegenerateCaseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The moment does not exist (Gamma-pole existence condition violated).
class MomentUndefinedError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace fadstat
