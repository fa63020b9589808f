#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace obl {

/// Caller violated an argument contract (bad count, arity mismatch, unknown id).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A point lies outside the domain it must belong to.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed file content. The message names the offending field or line.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnsupportedFunctionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when the loss stops being finite during training.
class TrainingError : public std::runtime_error {
 public:
  TrainingError(const std::string& what, std::size_t epoch)
      : std::runtime_error(what), epoch_(epoch) {}

  std::size_t epoch() const noexcept { return epoch_; }

 private:
  std::size_t epoch_;
};

}  // namespace obl
