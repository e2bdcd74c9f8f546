#pragma once

#include <stdexcept>
#include <string>

namespace locus {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Unknown alternative or criterion id.
class LookupError : public Error {
public:
  using Error::Error;
};

// Inputs that violate a type invariant or an operation precondition.
class ValidationError : public Error {
public:
  using Error::Error;
};

// Malformed input files. The message carries file, line and column.
class ParseError : public Error {
public:
  using Error::Error;
};

}  // namespace locus
