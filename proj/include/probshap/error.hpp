#pragma once

#include <stdexcept>
#include <string>

namespace probshap {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid parameters or configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// File could not be opened, read, or written.
class IoError : public Error {
 public:
  using Error::Error;
};

// Input file was readable but its content is malformed.
class ParseError : public IoError {
 public:
  using IoError::IoError;
};

// Schema of a tabular input does not match the expected columns.
class SchemaError : public ParseError {
 public:
  using ParseError::ParseError;
};

// A numeric routine produced a non-finite or otherwise unusable result.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace probshap
