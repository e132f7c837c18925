#ifndef TERM_ERROR_H_
#define TERM_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace term {

// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input data problems. The CLI maps these to exit code 2.
class DataError : public Error {
 public:
  using Error::Error;
};

class IoError : public DataError {
 public:
  using DataError::DataError;
};

class EncodingError : public DataError {
 public:
  EncodingError(const std::string& what, std::size_t byte_offset)
      : DataError(what + " (byte offset " + std::to_string(byte_offset) + ")"),
        byte_offset_(byte_offset) {}
  std::size_t byte_offset() const { return byte_offset_; }

 private:
  std::size_t byte_offset_;
};

class ParseError : public DataError {
 public:
  ParseError(const std::string& path, std::size_t line, const std::string& what)
      : DataError(path + ":" + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Invalid parameters or combinations; reported before any corpus I/O.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Operation called outside its domain (both strings empty, a=0 table, ...).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

class IncomparableTerms : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

class NotFound : public Error {
 public:
  using Error::Error;
};

class Conflict : public Error {
 public:
  using Error::Error;
};

class Busy : public Error {
 public:
  using Error::Error;
};

}  // namespace term

#endif  // TERM_ERROR_H_
