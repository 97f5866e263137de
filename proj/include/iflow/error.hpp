#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace iflow {

/// Malformed or inconsistent system description (shape, alphabet, parameter).
class SpecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The dense trajectory table would exceed the configured entry cap.
class GuardExceeded : public std::runtime_error {
 public:
  GuardExceeded(std::uint64_t required, std::uint64_t guard)
      : std::runtime_error("trajectory table needs " + std::to_string(required) +
                           " entries, enumeration guard is " + std::to_string(guard)),
        required_(required),
        guard_(guard) {}

  std::uint64_t required() const noexcept { return required_; }
  std::uint64_t guard() const noexcept { return guard_; }

 private:
  std::uint64_t required_;
  std::uint64_t guard_;
};

/// Invalid selector or query arguments (overlap, unknown coordinate, bad lag).
class QueryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Invalid run configuration (trial count, dims range, sweep range, ...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A quantity that must be nonnegative came out below -1e-9 bits.
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace iflow
