#pragma once

#include <stdexcept>
#include <string>

namespace amencert {

/// Malformed or inconsistent input (bad symbol, mismatched grids, schema violation).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A size limit (ball cap) would be exceeded.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Requested computation is not available for this group family.
class CapabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Iterative method failed, or a numerical contract was violated.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Measure whose density vanishes somewhere where a positive density is required.
class UnsupportedMeasureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value of the wrong provenance was offered to a certifying routine.
class PolicyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace amencert
