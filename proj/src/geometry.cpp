#include "dfoto/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dfoto/errors.hpp"
#include "dfoto/trust_region.hpp"

namespace dfoto {

double max_abs_over_ball(const QuadraticModel& l, const Point& center, double delta, Point* argmax) {
  const SubproblemResult lo = solve_subproblem(l, center, delta);
  const SubproblemResult hi = solve_subproblem(-l, center, delta);
  const Point x_lo = center + lo.d;
  const Point x_hi = center + hi.d;
  const double v_lo = std::abs(l.eval(x_lo));
  const double v_hi = std::abs(l.eval(x_hi));
  if (argmax != nullptr) *argmax = v_hi >= v_lo ? x_hi : x_lo;
  return std::max(v_lo, v_hi);
}

std::optional<GeometryProposal> far_point(const InterpolationSet& set, const KktSystem& sys,
                                          double delta, const GeometryOptions& options) {
  const Point x_opt = set.opt_point();
  Eigen::Index far = -1;
  double far_dist = options.far_factor * delta;
  for (Eigen::Index j = 0; j < set.size(); ++j) {
    if (j == set.opt_index()) continue;
    const double dist = (set.point(j) - x_opt).norm();
    if (dist > far_dist) {
      far_dist = dist;
      far = j;
    }
  }
  if (far < 0) return std::nullopt;
  GeometryProposal out;
  out.action = GeometryAction::far_point;
  out.index = far;
  out.lagrange_max = max_abs_over_ball(lagrange_polynomial(sys, set, far), x_opt,
                                       options.far_step_factor * delta, &out.point);
  return out;
}

GeometryProposal improve_geometry(const InterpolationSet& set, const KktSystem& sys, double delta,
                                  const GeometryOptions& options) {
  if (auto far = far_point(set, sys, delta, options)) return *far;
  const Point x_opt = set.opt_point();
  const Eigen::Index m = set.size();
  GeometryProposal out;

  double best = -1.0;
  for (Eigen::Index j = 0; j < m; ++j) {
    if (j == set.opt_index()) continue;
    Point arg;
    const double v = max_abs_over_ball(lagrange_polynomial(sys, set, j), x_opt, delta, &arg);
    if (v > best) {
      best = v;
      out.index = j;
      out.point = arg;
    }
  }
  out.lagrange_max = best;
  if (best > options.lambda_poised) {
    out.action = GeometryAction::lagrange;
  } else {
    out.action = GeometryAction::poised;
    out.index = -1;
    out.point = Point();
  }
  return out;
}

GeometryProposal perturbation_proposal(const InterpolationSet& set, double delta,
                                       std::int64_t& cycle) {
  const Eigen::Index n = set.dim();
  const Eigen::Index m = set.size();
  const Point x_opt = set.opt_point();
  const Eigen::Index j = static_cast<Eigen::Index>(cycle % n);
  const double sign = ((cycle / n) % 2 == 0) ? 1.0 : -1.0;
  ++cycle;

  GeometryProposal out;
  out.action = GeometryAction::perturbation;
  out.point = x_opt;
  out.point[j] += sign * delta;

  // A point coinciding with an earlier one goes first; otherwise the farthest.
  const double tol = 1e-13 * std::max(1.0, set.points().cwiseAbs().maxCoeff());
  for (Eigen::Index a = 0; a < m && out.index < 0; ++a) {
    for (Eigen::Index b = a + 1; b < m; ++b) {
      if ((set.point(a) - set.point(b)).norm() <= tol) {
        out.index = (b == set.opt_index()) ? a : b;
        break;
      }
    }
  }
  if (out.index < 0) {
    double far = -1.0;
    for (Eigen::Index k = 0; k < m; ++k) {
      if (k == set.opt_index()) continue;
      const double dist = (set.point(k) - x_opt).norm();
      if (dist > far) {
        far = dist;
        out.index = k;
      }
    }
  }
  return out;
}

GeometryProposal improve_geometry(const InterpolationSet& set, double delta,
                                  const GeometryOptions& options, std::int64_t& cycle,
                                  double sigma) {
  try {
    const KktSystem sys = KktSystem::assemble(set, sigma);
    return improve_geometry(set, sys, delta, options);
  } catch (const PoisednessError&) {
    return perturbation_proposal(set, delta, cycle);
  }
}

Eigen::Index select_drop(const InterpolationSet& set, const KktSystem& sys, const Point& x_new,
                         double delta, DropRule rule) {
  const Eigen::Index m = set.size();
  const Vector l = lagrange_values(sys, x_new).cwiseAbs();
  const Point x_opt = set.opt_point();
  Eigen::Index best = -1;

  if (rule == DropRule::value) {
    double lmax = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) {
      if (j != set.opt_index()) lmax = std::max(lmax, l[j]);
    }
    double worst = -std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < m; ++j) {
      if (j == set.opt_index() || l[j] < 0.1 * lmax || lmax == 0.0) continue;
      if (set.values()[j] > worst) {
        worst = set.values()[j];
        best = j;
      }
    }
    if (best >= 0) return best;
  }

  double score_best = -1.0;
  for (Eigen::Index j = 0; j < m; ++j) {
    if (j == set.opt_index()) continue;
    double score = l[j];
    if (rule == DropRule::distance) {
      const double ratio = (set.point(j) - x_opt).norm() / delta;
      const double weight = std::max(1.0, ratio * ratio);
      score *= weight * weight;
    }
    if (score > score_best) {
      score_best = score;
      best = j;
    }
  }
  return best;
}

}  // namespace dfoto
