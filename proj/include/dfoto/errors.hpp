#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace dfoto {

/// Raised when the interpolation KKT matrix is singular to working precision.
class PoisednessError : public std::runtime_error {
 public:
  PoisednessError(const std::string& what, double rcond)
      : std::runtime_error(what), rcond_(rcond) {}

  /// Reciprocal condition estimate of the offending matrix (0 if unknown).
  double rcond() const { return rcond_; }

 private:
  double rcond_;
};

/// The black box returned a non-finite value.
class EvaluationError : public std::runtime_error {
 public:
  EvaluationError(const std::string& what, Eigen::VectorXd point)
      : std::runtime_error(what), point_(std::move(point)) {}

  const Eigen::VectorXd& point() const { return point_; }

 private:
  Eigen::VectorXd point_;
};

/// The oracle's step ordering contract was violated.
class ProtocolError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Preconditions of an analysis routine do not hold, so no conclusion can be drawn.
class InconclusiveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// f_best >= f_start in a profile normalization.
class DegenerateProblemError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace dfoto
