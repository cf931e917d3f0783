#pragma once

#include <stdexcept>
#include <string>

namespace symrate {

/// Input violates a precondition (bad symbol, malformed file, bad parameter).
class invalid_input : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A requested structure is too large to hold.
class resource_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The stream is too short for the requested analysis.
class insufficient_data : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative numeric routine failed to converge.
class numeric_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A state distribution was driven by a string of probability zero.
class impossible_evolution : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace symrate
