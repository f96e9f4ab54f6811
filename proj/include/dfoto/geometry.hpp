#pragma once

#include <cstdint>
#include <optional>

#include "dfoto/interpolation_set.hpp"
#include "dfoto/kkt_system.hpp"

namespace dfoto {

struct GeometryOptions {
  double lambda_poised = 100.0;  // Lagrange bound above which a point is replaced
  double far_factor = 2.0;       // points beyond far_factor * delta of x_opt are far
  double far_step_factor = 2.0;  // a far point moves within far_step_factor * delta of x_opt
};

enum class GeometryAction { poised, far_point, lagrange, perturbation };

/// Replace point `index` with `point`, unless the action is `poised`.
struct GeometryProposal {
  GeometryAction action = GeometryAction::poised;
  Eigen::Index index = -1;
  Point point;
  double lagrange_max = 0.0;  // max |l_index| over the ball, when computed
};

/// Largest |l(x)| over the ball of radius delta about center, from the two
/// subproblems on l and -l. Returns the maximizer through `argmax`.
double max_abs_over_ball(const QuadraticModel& l, const Point& center, double delta, Point* argmax);

/// The far-point rule alone: the farthest point beyond far_factor * delta of
/// x_opt, moved to the maximizer of its Lagrange polynomial over the ball of
/// radius far_step_factor * delta.
std::optional<GeometryProposal> far_point(const InterpolationSet& set, const KktSystem& sys,
                                          double delta, const GeometryOptions& options);

/// Far-point rule first, then the largest Lagrange maximum if it exceeds the bound.
/// x_opt is never proposed for replacement. A singular system falls back to a
/// coordinate perturbation x_opt + delta e_j with j taken from `cycle`, which is
/// advanced.
GeometryProposal improve_geometry(const InterpolationSet& set, double delta,
                                  const GeometryOptions& options, std::int64_t& cycle,
                                  double sigma = 0.0);
GeometryProposal improve_geometry(const InterpolationSet& set, const KktSystem& sys, double delta,
                                  const GeometryOptions& options);

/// The perturbation fallback on its own.
GeometryProposal perturbation_proposal(const InterpolationSet& set, double delta,
                                       std::int64_t& cycle);

enum class DropRule { distance, value };

/// Index of the point x_new replaces.
///   distance: argmax |l_j(x_new)| * max(1, (||x_j - x_opt|| / delta)^2)^2
///   value:    largest stored value among points with |l_j(x_new)| >= 0.1 max |l|
/// x_opt is excluded.
Eigen::Index select_drop(const InterpolationSet& set, const KktSystem& sys, const Point& x_new,
                         double delta, DropRule rule);

}  // namespace dfoto
