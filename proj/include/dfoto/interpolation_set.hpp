#pragma once

#include <cstdint>
#include <vector>

#include "dfoto/quad_model.hpp"

namespace dfoto {

/// m sample points (columns), a base point, and the most recent step-tagged values.
class InterpolationSet {
 public:
  InterpolationSet() = default;
  /// `points` is n x m. Values default to zero with step tag 0.
  InterpolationSet(Matrix points, Point base);
  InterpolationSet(Matrix points, Point base, Vector values, std::int64_t step_tag);
  InterpolationSet(const std::vector<Point>& points, Point base);

  Eigen::Index dim() const { return points_.rows(); }
  Eigen::Index size() const { return points_.cols(); }

  const Matrix& points() const { return points_; }
  auto point(Eigen::Index j) const { return points_.col(j); }
  const Point& base() const { return base_; }
  const Vector& values() const { return values_; }
  std::int64_t step_tag() const { return step_tag_; }
  Eigen::Index opt_index() const { return opt_index_; }
  Point opt_point() const { return points_.col(opt_index_); }

  void set_values(Vector values, std::int64_t step_tag);
  /// Index of the minimum value; ties resolve to the lowest index.
  void set_opt_index(Eigen::Index j);
  void replace_point(Eigen::Index j, const Point& x);
  void set_base(const Point& base);

  /// Columns x_j - base.
  Matrix displacements() const;

  /// Smallest pairwise distance between points (infinity when m < 2).
  double min_pairwise_distance() const;
  /// Largest distance from the base to any point.
  double max_distance_from_base() const;

  /// n+2 <= m <= (n+1)(n+2)/2; with `allow_linear` the lower bound drops to n+1.
  static bool size_admissible(Eigen::Index n, Eigen::Index m, bool allow_linear = false);

 private:
  Matrix points_;
  Point base_;
  Vector values_;
  std::int64_t step_tag_ = 0;
  Eigen::Index opt_index_ = 0;
};

/// Index of the smallest entry; ties resolve to the lowest index.
Eigen::Index argmin_index(const Vector& values);

}  // namespace dfoto
