#include "dfoto/model_update.hpp"

#include <stdexcept>

namespace dfoto {

Vector values_at(const QuadraticModel& q, const InterpolationSet& set) {
  Vector v(set.size());
  for (Eigen::Index i = 0; i < set.size(); ++i) v[i] = q.eval(set.point(i));
  return v;
}

Vector build_residual(const UpdateInputs& in) {
  const auto m = in.set.size();
  if (in.new_values.size() != m || in.prev_values.size() != m) {
    throw std::invalid_argument("build_residual: value vectors must have length m");
  }
  if (in.t < 0 || in.t >= m) throw std::out_of_range("build_residual: replaced index");
  Vector r = Vector::Zero(m);
  if (in.mode == UpdateMode::trans) {
    for (Eigen::Index i = 0; i < m; ++i) {
      if (i != in.t) r[i] = in.new_values[i] - in.prev_values[i];
    }
  }
  r[in.t] = in.new_values[in.t] - in.prev_model.eval(in.set.point(in.t));
  return r;
}

QuadraticModel update(const UpdateInputs& in, const KktSystem& sys) {
  const Vector r = build_residual(in);
  const QuadraticModel d = from_kkt_solution(sys.solve(r), in.set);
  return add(in.prev_model, d);
}

QuadraticModel update(const UpdateInputs& in, double sigma) {
  return update(in, KktSystem::assemble(in.set, sigma));
}

QuadraticModel least_frobenius_model(const QuadraticModel& base, const InterpolationSet& set,
                                     const Vector& values, const KktSystem& sys) {
  if (values.size() != set.size()) {
    throw std::invalid_argument("least_frobenius_model: values length mismatch");
  }
  const Vector r = values - values_at(base, set);
  return add(base, from_kkt_solution(sys.solve(r), set));
}

QuadraticModel least_frobenius_model(const QuadraticModel& base, const InterpolationSet& set,
                                     const Vector& values, double sigma) {
  return least_frobenius_model(base, set, values, KktSystem::assemble(set, sigma));
}

}  // namespace dfoto
