#pragma once

#include <stdexcept>
#include <string>

namespace dyngeo {

// Bad user input: malformed Newick, mismatched label sets, out-of-range
// parameters. The CLI maps these to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An internal invariant failed, usually through floating point breakdown.
// The CLI maps these to exit code 1.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dyngeo
