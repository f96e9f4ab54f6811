#pragma once

#include <functional>
#include <vector>

#include "dfoto/interpolation_set.hpp"
#include "dfoto/quad_model.hpp"
#include "dfoto/transform_oracle.hpp"

namespace dfoto {

/// Linear conditions C v = offset on transformed values v at the set's points under
/// which the updated model keeps d* as its interior minimizer step from x_opt.
struct MopSystem {
  Matrix coefficient_matrix;  // n x m
  Vector offset;              // n
  InterpolationSet set;       // rebased at x_opt
  QuadraticModel q_alpha;
  Point x_opt;
  Vector d_star;
  double delta = 0.0;
};

/// Requires ||d*|| < delta and a strictly convex Q_alpha (smallest Hessian
/// eigenvalue above 1e-10); throws InconclusiveError otherwise. The set is
/// re-expressed about x_opt.
MopSystem build_mop_system(const InterpolationSet& set, const QuadraticModel& q_alpha,
                           const Point& x_opt, const Vector& d_star, double delta,
                           double sigma = 0.0);

struct MopCheck {
  bool satisfied = false;
  double residual = 0.0;  // ||C v - offset||_inf
  double scale = 1.0;
};

/// Satisfied iff ||C v - offset||_inf <= 1e-8 * max(1, ||C||_inf ||v||_inf, ||offset||_inf).
MopCheck check_mop(const MopSystem& system, const Vector& values);

struct SolutionSpace {
  Vector particular;   // least-norm solution
  Matrix basis;        // m x (m - rank), orthonormal
  Eigen::Index rank = 0;
  bool full_row_rank = false;  // rank == n
  double residual = 0.0;       // of the particular solution
};

/// Rank by SVD with threshold 1e-10 * sigma_max. Rank deficiency is reported, not fatal.
SolutionSpace solution_space(const MopSystem& system);

/// True when v lies in the affine solution set, within the check_mop tolerance.
bool in_solution_space(const MopSystem& system, const Vector& v);

struct OptimalityCheck {
  bool preserved = false;
  Point argmin_f;
  Point argmin_transformed;
  double grid_spacing = 0.0;
};

/// Brute-force comparison of argmin f and argmin T(f) over the delta-ball about
/// x_opt: a grid with `resolution` nodes per axis, then a comparison-only compass
/// polish. Requires n <= 3 (std::invalid_argument otherwise).
OptimalityCheck check_objective_optimality_preserving(const Objective& f, const Transformation& t,
                                                      const Point& x_opt, double delta,
                                                      int resolution = 41);

struct FullyLinearConstants {
  double kappa_g_hat = 0.0;
  double kappa_f_hat = 0.0;
  // ingredients
  Eigen::Index m = 0;
  double l_pinv_norm = 0.0;
  double mu_alpha = 0.0;
  double qtilde_hess_norm = 0.0;
  double kappa_g = 0.0;
  double kappa_f = 0.0;
  double c1 = 1.0;
};

/// Error constants of M_{Q_alpha}(C1 f + C2) given those (kappa_g, kappa_f) of
/// M_{Q_alpha}(f). L-hat holds the rows (x_i - x_c)/delta for x_i != x_c; a
/// rank-deficient L-hat throws PoisednessError.
FullyLinearConstants fully_linear_constants(const InterpolationSet& set, const Point& x_c,
                                            double delta, double kappa_g, double kappa_f,
                                            double c1, double mu_alpha, double qtilde_hess_norm);

/// ||H||_2 of the model's Hessian (the Lipschitz constant of its gradient).
double gradient_lipschitz(const QuadraticModel& q);

}  // namespace dfoto
