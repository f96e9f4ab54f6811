#pragma once

#include "dfoto/interpolation_set.hpp"
#include "dfoto/kkt_system.hpp"
#include "dfoto/quad_model.hpp"

namespace dfoto {

/// trans: re-queried values feed the residual. plain: only the new point's value
/// does, as in an updater that assumes stored values never change.
enum class UpdateMode { trans, plain };

/// Inputs for one least-Frobenius-norm model update. Slot t of `set` already holds
/// x_new; prev_values[t] is ignored.
struct UpdateInputs {
  const QuadraticModel& prev_model;
  const InterpolationSet& set;
  const Vector& new_values;
  const Vector& prev_values;
  Eigen::Index t;
  UpdateMode mode = UpdateMode::trans;
};

/// r_i = f_k(x_i) - f_{k-1}(x_i) (i != t, trans mode; zero in plain mode) and
/// r_t = f_k(x_new) - Q_{k-1}(x_new).
Vector build_residual(const UpdateInputs& in);

/// Q_k = Q_{k-1} + D_k, with D_k the minimum-Frobenius-norm (optionally
/// gradient-weighted) quadratic fitting the residual.
QuadraticModel update(const UpdateInputs& in, double sigma = 0.0);
/// Same, reusing an already assembled KKT system for `in.set`.
QuadraticModel update(const UpdateInputs& in, const KktSystem& sys);

/// The least Frobenius norm updating model of values h on `set` based on `base`:
/// argmin ||H_Q - H_base||_F subject to Q(x_i) = h_i.
QuadraticModel least_frobenius_model(const QuadraticModel& base, const InterpolationSet& set,
                                     const Vector& values, double sigma = 0.0);
QuadraticModel least_frobenius_model(const QuadraticModel& base, const InterpolationSet& set,
                                     const Vector& values, const KktSystem& sys);

/// Values of q at every point of the set.
Vector values_at(const QuadraticModel& q, const InterpolationSet& set);

}  // namespace dfoto
