#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace mgsim {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid input data: bad dimensions, negative gains, malformed schedules.
struct ValidationError : Error {
  using Error::Error;
};

// A linear solve hit a numerically singular matrix.
struct SingularityError : Error {
  using Error::Error;
};

// Out-of-range inverter or leader index.
struct IndexError : Error {
  using Error::Error;
};

// A text input could not be parsed. `line` is 1-based, 0 when unknown.
struct ParseError : Error {
  explicit ParseError(const std::string& msg, int line_ = 0) : Error(msg), line(line_) {}
  int line;
};

// Filesystem failure; the message carries the path.
struct IoError : Error {
  using Error::Error;
};

}  // namespace mgsim
