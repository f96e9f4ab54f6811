#include "dfoto/quad_model.hpp"

#include <stdexcept>
#include <string>

#include "dfoto/interpolation_set.hpp"

namespace dfoto {

namespace {

void require_dim(Eigen::Index expected, Eigen::Index got, const char* what) {
  if (expected != got) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (expected " +
                                std::to_string(expected) + ", got " + std::to_string(got) + ")");
  }
}

}  // namespace

QuadraticModel::QuadraticModel(Point base)
    : base_(std::move(base)),
      gradient_(Vector::Zero(base_.size())),
      hessian_(Matrix::Zero(base_.size(), base_.size())) {}

QuadraticModel::QuadraticModel(Point base, double constant, Vector gradient, Matrix hessian)
    : base_(std::move(base)),
      constant_(constant),
      gradient_(std::move(gradient)),
      hessian_(std::move(hessian)) {
  const auto n = base_.size();
  require_dim(n, gradient_.size(), "QuadraticModel gradient");
  require_dim(n, hessian_.rows(), "QuadraticModel hessian");
  require_dim(n, hessian_.cols(), "QuadraticModel hessian");
  hessian_ = 0.5 * (hessian_ + hessian_.transpose()).eval();
}

QuadraticModel QuadraticModel::zero(Eigen::Index n) { return QuadraticModel(Point::Zero(n)); }

double QuadraticModel::eval(const Point& x) const {
  require_dim(dim(), x.size(), "QuadraticModel::eval");
  const Vector s = x - base_;
  return constant_ + s.dot(gradient_) + 0.5 * s.dot(hessian_ * s);
}

Vector QuadraticModel::gradient_at(const Point& x) const {
  require_dim(dim(), x.size(), "QuadraticModel::gradient_at");
  return gradient_ + hessian_ * (x - base_);
}

QuadraticModel QuadraticModel::rebased(const Point& new_base) const {
  require_dim(dim(), new_base.size(), "QuadraticModel::rebased");
  QuadraticModel out = *this;
  out.constant_ = eval(new_base);
  out.gradient_ = gradient_at(new_base);
  out.base_ = new_base;
  return out;
}

QuadraticModel QuadraticModel::operator-() const { return scaled(-1.0); }

QuadraticModel QuadraticModel::scaled(double factor) const {
  QuadraticModel out = *this;
  out.constant_ *= factor;
  out.gradient_ *= factor;
  out.hessian_ *= factor;
  return out;
}

QuadraticModel QuadraticModel::shifted(double offset) const {
  QuadraticModel out = *this;
  out.constant_ += offset;
  return out;
}

QuadraticModel add(const QuadraticModel& a, const QuadraticModel& b) {
  require_dim(a.dim(), b.dim(), "add");
  const QuadraticModel bb = b.base() == a.base() ? b : b.rebased(a.base());
  return QuadraticModel(a.base(), a.constant() + bb.constant(), a.gradient() + bb.gradient(),
                        a.hessian() + bb.hessian());
}

QuadraticModel operator+(const QuadraticModel& a, const QuadraticModel& b) { return add(a, b); }

QuadraticModel from_kkt_solution(const KktSolution& sol, const InterpolationSet& set) {
  const auto n = set.dim();
  require_dim(set.size(), sol.lambda.size(), "from_kkt_solution lambda");
  require_dim(n, sol.g.size(), "from_kkt_solution g");
  const Matrix y = set.displacements();
  // sum_j lambda_j y_j y_j'
  const Matrix hessian = y * sol.lambda.asDiagonal() * y.transpose();
  return QuadraticModel(set.base(), sol.c, sol.g, hessian);
}

}  // namespace dfoto
