#pragma once

#include <stdexcept>
#include <string>

namespace phreg {

/// Malformed arguments: shape mismatch, non-finite coordinates, sizes out of range.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input is well-formed but numerically degenerate (zero variance, zero total persistence).
class DegenerateInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// log E(Y) of a target subset is too close to zero for the ratio loss.
class DegenerateTarget : public DegenerateInput {
 public:
  DegenerateTarget(const std::string& what, std::size_t subset_size)
      : DegenerateInput(what), subset_size_(subset_size) {}
  std::size_t subset_size() const noexcept { return subset_size_; }

 private:
  std::size_t subset_size_;
};

/// External point-cloud data could not be read or is unusable.
class IngestionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace phreg
