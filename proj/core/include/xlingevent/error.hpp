#pragma once

#include <stdexcept>
#include <string>

namespace xlingevent {

/// Malformed or inconsistent input data. The CLI maps this to exit code 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Interface misuse: invalid argument values, violated call contracts.
/// The CLI maps this to exit code 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace xlingevent
