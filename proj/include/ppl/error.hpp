#pragma once

#include <stdexcept>
#include <string>

namespace ppl {

// Bad input: invalid parameters, malformed patterns or configs.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A well-posed computation that could not be carried out
// (factorization failure, no feasible parameter, non-finite values).
class ComputationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ppl
