#pragma once

#include <stdexcept>
#include <string>

namespace dyadlab {

// Interval or function outside the working domain.
class DomainError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// An operation was called outside its stated preconditions.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A weight that must be strictly positive has a zero or negative cell.
class PositivityError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dyadlab
