#pragma once

#include <vector>

#include "dfoto/interpolation_set.hpp"
#include "dfoto/quad_model.hpp"

namespace dfoto {

/// Reciprocal condition threshold below which W is treated as singular.
inline constexpr double kPoisednessRcondThreshold = 1e-12;

/// The (m+n+1)-square saddle-point matrix
///
///     W = [ A   X' ]        A_ij = 1/2 ((x_i-x0)'(x_j-x0))^2
///         [ X   Z  ]        X    = rows (1 ; x_j - x0)
///
/// with Z = 0, or diag(0, -sigma/2 I) for the gradient-weighted variant, together
/// with a Bunch-Kaufman factorization. Unknowns are ordered (lambda, c, g).
///
/// The factorization is computed on the system expressed in coordinates scaled by
/// the set's radius about x0. Minimizing the Hessian Frobenius norm is invariant
/// under that scaling (sigma is rescaled accordingly), so solutions are mapped
/// back exactly; scaling only keeps the condition estimate meaningful for small
/// radii.
class KktSystem {
 public:
  /// Throws PoisednessError when the estimated reciprocal condition number of the
  /// scaled W is below kPoisednessRcondThreshold.
  static KktSystem assemble(const InterpolationSet& set, double sigma = 0.0);

  Eigen::Index num_points() const { return m_; }
  Eigen::Index dim() const { return n_; }
  double sigma() const { return sigma_; }
  double rcond() const { return rcond_; }
  const Point& base() const { return base_; }
  const Matrix& displacements() const { return disp_; }

  /// W in the original (unscaled) coordinates.
  Matrix matrix() const;

  /// (lambda, c, g) = W^{-1} (r, 0).
  KktSolution solve(const Vector& r) const;

  /// W^{-1} rhs for a general right-hand side of length m+n+1.
  Vector solve_full(const Vector& rhs) const;

  /// Max-norm residual of W (lambda, c, g) - (r, 0) in original coordinates.
  double residual(const KktSolution& sol, const Vector& r) const;

 private:
  KktSystem() = default;

  Eigen::Index m_ = 0;
  Eigen::Index n_ = 0;
  double sigma_ = 0.0;
  double scale_ = 1.0;
  double rcond_ = 0.0;
  Point base_;
  Matrix disp_;
  Matrix factor_;       // column-major LAPACK dsytrf output for the scaled W
  std::vector<int> pivots_;
};

/// Minimum-Frobenius-norm quadratic with l_j(x_i) = delta_ij (0-based j).
QuadraticModel lagrange_polynomial(const KktSystem& sys, const InterpolationSet& set,
                                   Eigen::Index j);

/// Values of all Lagrange polynomials at x, without forming the models.
Vector lagrange_values(const KktSystem& sys, const Point& x);

}  // namespace dfoto
