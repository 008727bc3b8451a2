#pragma once

#include <stdexcept>
#include <string>

namespace clear {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file content (pairs file, bundle JSON, RST bracketing, TSV).
class ParseError : public Error {
 public:
  using Error::Error;
};

// Well-formed input that violates a documented invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

class TransportError : public Error {
 public:
  using Error::Error;
};

// The judge answered, but no rating could be extracted.
class JudgeParseError : public Error {
 public:
  JudgeParseError(const std::string& what, std::string raw)
      : Error(what), raw_response_(std::move(raw)) {}
  const std::string& raw_response() const noexcept { return raw_response_; }

 private:
  std::string raw_response_;
};

}  // namespace clear
