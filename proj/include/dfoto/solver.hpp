#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "dfoto/geometry.hpp"
#include "dfoto/interpolation_set.hpp"
#include "dfoto/model_update.hpp"
#include "dfoto/quad_model.hpp"
#include "dfoto/transform_oracle.hpp"

namespace dfoto {

struct SolverConfig {
  Eigen::Index n = 0;  // 0: taken from x_start
  Eigen::Index m = 0;  // 0: 2n+1
  double rho_beg = 1e-1;
  double rho_end = 1e-8;
  std::int64_t max_nf = 10000;
  double sigma = 0.0;
  UpdateMode mode = UpdateMode::trans;
  DropRule drop_rule = DropRule::distance;
  std::uint64_t seed = 0;  // carried into run records; the loop itself is deterministic
  GeometryOptions geometry;
  double delta_max_factor = 1e3;  // delta_max = factor * rho_beg
  int max_consecutive_failures = 3;
  bool record_history = true;

  /// Fills n and m defaults and throws std::invalid_argument on bad sizes or radii.
  SolverConfig resolved(Eigen::Index dim) const;
};

enum class StepKind { initial, trial, geometry };

struct IterationRecord {
  std::int64_t iteration = 0;
  std::int64_t nf = 0;
  double delta = 0.0;
  double rho = 0.0;
  double step_norm = 0.0;
  double ratio = 0.0;  // NaN for initial and geometry steps
  bool accepted = false;
  Eigen::Index drop_index = -1;
  double f_best_true = 0.0;
  StepKind kind = StepKind::trial;
};

enum class Termination { rho_converged, max_nf, stalled };

std::string to_string(Termination t);
std::string to_string(UpdateMode mode);
std::string to_string(DropRule rule);

struct SolverResult {
  Point x_best;
  double f_best_true = 0.0;
  std::vector<IterationRecord> history;
  Termination termination = Termination::rho_converged;
  std::int64_t nf = 0;           // evaluations including re-queried points
  std::int64_t distinct_nf = 0;  // evaluations at newly introduced points
  std::int64_t iterations = 0;   // oracle steps after initialization
  double final_delta = 0.0;
  double final_rho = 0.0;
};

/// {x, x + rho e_1, ..., x + rho e_n, x - rho e_1, ..., x - rho e_n} truncated to
/// m points; beyond 2n+1, x + rho (e_i + e_j) for i < j in order.
Matrix initial_points(const Point& x_start, double rho, Eigen::Index m);

/// Queries the initial set at step 1 and fits Q_1 from the zero model.
std::pair<InterpolationSet, QuadraticModel> initialize(const SolverConfig& config,
                                                       BatchOracle& oracle, const Point& x_start);

/// Trust-region loop: every step re-queries the whole set under one transformation.
SolverResult minimize(const SolverConfig& config, BatchOracle& oracle, const Point& x_start);

/// Columns: iteration, NF, delta, rho, step_norm, ratio, accepted, drop_index,
/// f_best_true.
void write_run_csv(std::ostream& os, const SolverResult& result);

}  // namespace dfoto
