#include "dfoto/interpolation_set.hpp"

#include <limits>
#include <stdexcept>

namespace dfoto {

InterpolationSet::InterpolationSet(Matrix points, Point base)
    : InterpolationSet(std::move(points), std::move(base), Vector(), 0) {}

InterpolationSet::InterpolationSet(Matrix points, Point base, Vector values, std::int64_t step_tag)
    : points_(std::move(points)), base_(std::move(base)), values_(std::move(values)),
      step_tag_(step_tag) {
  if (points_.rows() != base_.size()) {
    throw std::invalid_argument("InterpolationSet: base dimension does not match points");
  }
  if (!points_.allFinite() || !base_.allFinite()) {
    throw std::invalid_argument("InterpolationSet: non-finite coordinates");
  }
  if (values_.size() == 0) {
    values_ = Vector::Zero(points_.cols());
  } else if (values_.size() != points_.cols()) {
    throw std::invalid_argument("InterpolationSet: values length does not match point count");
  } else {
    opt_index_ = argmin_index(values_);
  }
}

InterpolationSet::InterpolationSet(const std::vector<Point>& points, Point base)
    : InterpolationSet(
          [&] {
            Matrix p(base.size(), static_cast<Eigen::Index>(points.size()));
            for (std::size_t j = 0; j < points.size(); ++j) {
              if (points[j].size() != base.size()) {
                throw std::invalid_argument("InterpolationSet: point dimension mismatch");
              }
              p.col(static_cast<Eigen::Index>(j)) = points[j];
            }
            return p;
          }(),
          base) {}

void InterpolationSet::set_values(Vector values, std::int64_t step_tag) {
  if (values.size() != size()) {
    throw std::invalid_argument("InterpolationSet::set_values: length mismatch");
  }
  values_ = std::move(values);
  step_tag_ = step_tag;
}

void InterpolationSet::set_opt_index(Eigen::Index j) {
  if (j < 0 || j >= size()) throw std::out_of_range("InterpolationSet::set_opt_index");
  opt_index_ = j;
}

void InterpolationSet::replace_point(Eigen::Index j, const Point& x) {
  if (j < 0 || j >= size()) throw std::out_of_range("InterpolationSet::replace_point");
  if (x.size() != dim()) throw std::invalid_argument("InterpolationSet::replace_point: dimension");
  points_.col(j) = x;
}

void InterpolationSet::set_base(const Point& base) {
  if (base.size() != dim()) throw std::invalid_argument("InterpolationSet::set_base: dimension");
  base_ = base;
}

Matrix InterpolationSet::displacements() const { return points_.colwise() - base_; }

double InterpolationSet::min_pairwise_distance() const {
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < size(); ++i) {
    for (Eigen::Index j = i + 1; j < size(); ++j) {
      best = std::min(best, (points_.col(i) - points_.col(j)).norm());
    }
  }
  return best;
}

double InterpolationSet::max_distance_from_base() const {
  if (size() == 0) return 0.0;
  return displacements().colwise().norm().maxCoeff();
}

bool InterpolationSet::size_admissible(Eigen::Index n, Eigen::Index m, bool allow_linear) {
  const Eigen::Index lo = allow_linear ? n + 1 : n + 2;
  return m >= lo && m <= (n + 1) * (n + 2) / 2;
}

Eigen::Index argmin_index(const Vector& values) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < values.size(); ++i) {
    if (values[i] < values[best]) best = i;
  }
  return best;
}

}  // namespace dfoto
