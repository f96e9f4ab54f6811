#pragma once

#include "dfoto/quad_model.hpp"

namespace dfoto {

struct SubproblemResult {
  Vector d;
  double predicted_reduction = 0.0;  // Q(center) - Q(center + d)
  bool on_boundary = false;
  double multiplier = 0.0;           // mu >= 0 of the ball constraint
};

/// Global minimizer of g'd + 1/2 d'Hd over ||d|| <= delta (More-Sorensen).
SubproblemResult solve_subproblem(const Vector& g, const Matrix& hessian, double delta);
/// Same for the model about `center`.
SubproblemResult solve_subproblem(const QuadraticModel& model, const Point& center, double delta);

struct RadiusState {
  double delta = 0.1;
  double rho = 0.1;
  double rho_end = 1e-8;
  double delta_max = 100.0;
};

/// Ratio thresholds and factors for the radius update.
struct RadiusPolicy {
  static constexpr double kShrinkBelow = 0.1;
  static constexpr double kGrowAbove = 0.7;
  static constexpr double kShrinkFactor = 0.5;
  static constexpr double kGrowFactor = 2.0;
  static constexpr double kRhoFactor = 10.0;
};

/// ratio < 0.1 halves delta (not below rho); ratio > 0.7 with a boundary step
/// doubles it (not above delta_max).
RadiusState update_radius(const RadiusState& state, double ratio, double step_norm);

enum class RhoDecision { proceed, shrink_rho, terminate };

struct RhoCheck {
  RhoDecision decision;
  RadiusState next;
};

/// ||d|| >= rho: proceed. Otherwise shrink rho tenfold (not below rho_end), or
/// terminate when rho has already reached rho_end.
RhoCheck check_rho_termination(const RadiusState& state, double step_norm);
RhoCheck check_rho_termination(const RadiusState& state, const SubproblemResult& sub);

}  // namespace dfoto
