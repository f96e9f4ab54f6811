#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "dfoto/solver.hpp"

namespace dfoto {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// (f_value - f_start) / (f_best - f_start), clamped to [0, 1]. Throws
/// DegenerateProblemError when f_best >= f_start.
double f_acc(double f_value, double f_start, double f_best);

/// First NF at which the true objective at x_opt reaches f_acc >= 1 - tau.
std::optional<std::int64_t> evaluations_to_accuracy(const std::vector<IterationRecord>& history,
                                                    double f_start, double f_best, double tau);

/// Per (solver, problem) measures: N in performance profiles, std(NF) in
/// sensitivity profiles. +inf marks a failure.
struct ProfileTable {
  double tau = 0.0;
  std::vector<std::string> solvers;
  std::vector<std::string> problems;
  Matrix measure;  // solvers x problems

  bool success(Eigen::Index s, Eigen::Index p) const { return std::isfinite(measure(s, p)); }
  /// r_{s,p} = measure / min over solvers; 0/0 counts as 1 and x/0 as +inf.
  Matrix ratios() const;
};

/// Right-continuous step function pi(alpha) = |{p : r_p <= alpha}| / |P|.
struct ProfileCurve {
  std::string solver;
  std::vector<double> breakpoints;  // sorted finite ratios, duplicates removed
  std::vector<double> values;       // pi at each breakpoint
  double success_fraction = 0.0;

  double at(double alpha) const;
};

/// One curve per solver of the table.
std::vector<ProfileCurve> performance_profile(const ProfileTable& table);

struct NfStatistics {
  double mean = 0.0;
  double stddev = 0.0;  // population form: sqrt(mean of squared deviations)
};

NfStatistics nf_statistics(const std::vector<double>& nf);

}  // namespace dfoto
