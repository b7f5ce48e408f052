#pragma once

#include <stdexcept>
#include <string>

namespace phonojsd {

/// Malformed input files or records. The CLI maps this to exit code 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A computation that cannot produce a result, e.g. an empty distribution.
/// The CLI maps this to exit code 3.
class ComputationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad arguments raise std::invalid_argument (CLI exit code 1).

}  // namespace phonojsd
