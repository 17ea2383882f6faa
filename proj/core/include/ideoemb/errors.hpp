#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ideoemb {

// Invalid argument or malformed input. Base of every library error that is
// caused by the caller rather than by a bug.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A probability argument outside [0,1].
class DomainError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Vectors whose lengths disagree with the topic count.
class ShapeError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class PreconditionError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// AUC with a single class, AP without positives.
class UndefinedMetricError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Raised by fit() when the training items carry no (activator, follower)
// propagation pair.
class NoTrainingDataError : public std::runtime_error {
 public:
  NoTrainingDataError() : std::runtime_error("no propagation pairs in training data") {}
};

// Malformed file content; what() reads "<path>:<line>: <message>".
class ParseError : public ValidationError {
 public:
  ParseError(const std::string& path, std::size_t line, const std::string& message);

  const std::string& path() const { return path_; }
  std::size_t line() const { return line_; }

 private:
  std::string path_;
  std::size_t line_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ideoemb
