#pragma once

#include <stdexcept>
#include <string>

namespace qtheta {

// Raised when an argument violates an operation's precondition.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

// A truncated series would need a radius larger than the configured budget.
class RadiusBudgetExceeded : public Error {
 public:
  RadiusBudgetExceeded(const std::string& what, long required, long budget)
      : Error(what), required_(required), budget_(budget) {}

  long required() const { return required_; }
  long budget() const { return budget_; }

 private:
  long required_;
  long budget_;
};

}  // namespace qtheta
