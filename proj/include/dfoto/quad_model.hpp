#pragma once

#include <Eigen/Core>

namespace dfoto {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Point = Eigen::VectorXd;

class InterpolationSet;

/// Parameters (lambda, c, g) of a least-Frobenius-norm increment
/// D(x) = c + (x-x0)'g + 1/2 sum_j lambda_j ((x-x0)'(x_j-x0))^2.
struct KktSolution {
  Vector lambda;
  double c = 0.0;
  Vector g;
};

/// Explicit quadratic Q(x) = constant + (x-base)'gradient + 1/2 (x-base)'H(x-base).
class QuadraticModel {
 public:
  QuadraticModel() = default;
  /// Zero model in dimension n about `base`.
  explicit QuadraticModel(Point base);
  /// The hessian is symmetrized on construction.
  QuadraticModel(Point base, double constant, Vector gradient, Matrix hessian);

  static QuadraticModel zero(Eigen::Index n);

  Eigen::Index dim() const { return base_.size(); }
  const Point& base() const { return base_; }
  double constant() const { return constant_; }
  const Vector& gradient() const { return gradient_; }
  const Matrix& hessian() const { return hessian_; }

  double eval(const Point& x) const;
  Vector gradient_at(const Point& x) const;

  /// The same function re-expressed about a new base point.
  QuadraticModel rebased(const Point& new_base) const;

  QuadraticModel operator-() const;
  QuadraticModel scaled(double factor) const;
  /// Adds a constant to the function.
  QuadraticModel shifted(double offset) const;

 private:
  Point base_;
  double constant_ = 0.0;
  Vector gradient_;
  Matrix hessian_;
};

/// Pointwise sum, expressed about a's base. Hessian is re-symmetrized.
QuadraticModel add(const QuadraticModel& a, const QuadraticModel& b);
QuadraticModel operator+(const QuadraticModel& a, const QuadraticModel& b);

/// Explicit form of the increment defined by a KKT solution on `set` (about set.base()).
QuadraticModel from_kkt_solution(const KktSolution& sol, const InterpolationSet& set);

}  // namespace dfoto
