#pragma once

#include <stdexcept>
#include <string>

namespace rainsketch {

class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when merging sketches whose width, row count or seeds differ.
class IncompatibleSketch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TimeRegression : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A rank query named a time outside the estimator's current window.
class StaleWindow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotWaiting : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyReport : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or truncated serialized snapshot.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rainsketch
