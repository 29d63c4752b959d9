#pragma once

#include <stdexcept>
#include <string>

namespace fairspec {

/// Base class for every error the library raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A probability vector failed validation (negative, non-finite, all-zero, bad length).
class InvalidDistribution : public Error {
 public:
  using Error::Error;
};

/// A numeric argument outside its documented domain.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A schedule decision uses more slots than the capacity allows.
class BudgetViolation : public Error {
 public:
  using Error::Error;
};

/// An enumeration request exceeds the combinatorial guard.
class SizeGuardError : public Error {
 public:
  using Error::Error;
};

/// Configuration parse or validation failure. `key()` names the offending key.
class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& what)
      : Error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace fairspec
