#pragma once

#include <stdexcept>
#include <string>

namespace homest {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on the arguments was violated (bad dimension, negative time, η outside [0,1], ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The numerics failed: non-finite state, degenerate steady state, insufficient decay.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

/// Reading or writing a file failed.
class IoFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace homest
