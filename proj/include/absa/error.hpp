#pragma once

#include <stdexcept>
#include <string>

namespace absa {

// Base for every error raised by the toolkit. Callers that only need to
// report and exit can catch this one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class AlignmentError : public Error {
 public:
  using Error::Error;
};

class PaddingError : public Error {
 public:
  using Error::Error;
};

class TrainingError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class CorruptArchiveError : public Error {
 public:
  using Error::Error;
};

class UnsupportedVersionError : public Error {
 public:
  using Error::Error;
};

}  // namespace absa
