#pragma once

#include <stdexcept>
#include <string>

namespace vinedep {

// Bad or inconsistent input data: schema mismatches, empty tables,
// unsatisfiable preconditions on user-supplied values.  CLI exit code 3.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure: optimizer or root-finder did not converge, parameters
// outside their admissible domain, degenerate inputs.  CLI exit code 4.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace vinedep
