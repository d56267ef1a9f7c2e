#pragma once

#include <stdexcept>
#include <string>

namespace dflex {

// Malformed or inconsistent input files. CLI maps this to exit code 3.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Failed numerical computation (e.g. an optimizer that cannot start). Exit code 4.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace dflex
