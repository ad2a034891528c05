#ifndef SUBTROP_ERROR_HPP_
#define SUBTROP_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace subtrop {

// Malformed or invariant-violating input data (bad CSV cell, negative value,
// infeasible holdout request).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad parameters or flag combinations supplied by a caller.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace subtrop

#endif  // SUBTROP_ERROR_HPP_
