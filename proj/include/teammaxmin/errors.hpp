#pragma once

#include <stdexcept>
#include <string>

namespace tmm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes or indices that do not match the game they are used with.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// An instance (tensor, joint game, oracle grid) too large to materialize.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Malformed external input (files, command-line values).
class InputError : public Error {
 public:
  using Error::Error;
};

/// The LP solver failed to produce a trustworthy answer.
class LpError : public Error {
 public:
  using Error::Error;
};

}  // namespace tmm
