#pragma once

#include <stdexcept>
#include <string>

namespace sublln {

// Base for every error the library raises on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad parameters at construction time (distributions, schemes, configs).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A requested integral or moment is infinite (detected from tail indices).
class NonIntegrable : public Error {
 public:
  using Error::Error;
};

// An exact computation would exceed its node/state budget.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

// The exact path (enumeration, DP, audit) needs discrete members.
class UnsupportedExact : public Error {
 public:
  using Error::Error;
};

// Malformed scenario configuration; the message is line-anchored when possible.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// The scenario's ambiguity set breaks its own domination hypothesis.
class DominationViolation : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

}  // namespace sublln
