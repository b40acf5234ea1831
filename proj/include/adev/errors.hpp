#pragma once

#include <stdexcept>
#include <string>

namespace adev {

// Base of every error the library throws. The CLI maps the first group to
// exit status 1 and the second group to exit status 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Validation errors.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

// Numeric and training failures.
class NumericError : public Error {
 public:
  using Error::Error;
};

class TrainingError : public Error {
 public:
  using Error::Error;
};

// A broken internal invariant (e.g. a development that is not unitary).
class InternalError : public Error {
 public:
  using Error::Error;
};

inline void require_arg(bool ok, const std::string& what) {
  if (!ok) throw ArgumentError(what);
}

inline void require_shape(bool ok, const std::string& what) {
  if (!ok) throw ShapeError(what);
}

}  // namespace adev
