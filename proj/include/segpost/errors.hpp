#pragma once

#include <stdexcept>
#include <string>

namespace segpost {

// Malformed or inconsistent input: bad files, dimensions, indices, infeasible K.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Inputs are well formed but the model degenerates (zero scale, zero rate).
class DegenerateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace segpost
