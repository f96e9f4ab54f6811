#include "dfoto/profiles.hpp"

#include <algorithm>
#include <cmath>

#include "dfoto/errors.hpp"

namespace dfoto {

double f_acc(double f_value, double f_start, double f_best) {
  if (!(f_best < f_start)) throw DegenerateProblemError("f_acc: f_best must be below f_start");
  const double v = (f_value - f_start) / (f_best - f_start);
  return std::clamp(v, 0.0, 1.0);
}

std::optional<std::int64_t> evaluations_to_accuracy(const std::vector<IterationRecord>& history,
                                                    double f_start, double f_best, double tau) {
  for (const IterationRecord& r : history) {
    if (f_acc(r.f_best_true, f_start, f_best) >= 1.0 - tau) return r.nf;
  }
  return std::nullopt;
}

Matrix ProfileTable::ratios() const {
  Matrix r(measure.rows(), measure.cols());
  for (Eigen::Index p = 0; p < measure.cols(); ++p) {
    const double best = measure.col(p).minCoeff();
    for (Eigen::Index s = 0; s < measure.rows(); ++s) {
      const double v = measure(s, p);
      if (!std::isfinite(v)) {
        r(s, p) = kInf;
      } else if (best == 0.0) {
        r(s, p) = v == 0.0 ? 1.0 : kInf;
      } else {
        r(s, p) = v / best;
      }
    }
  }
  return r;
}

double ProfileCurve::at(double alpha) const {
  const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), alpha);
  if (it == breakpoints.begin()) return 0.0;
  return values[static_cast<std::size_t>(it - breakpoints.begin() - 1)];
}

std::vector<ProfileCurve> performance_profile(const ProfileTable& table) {
  const Matrix r = table.ratios();
  const double np = static_cast<double>(r.cols());
  std::vector<ProfileCurve> out;
  for (Eigen::Index s = 0; s < r.rows(); ++s) {
    ProfileCurve c;
    c.solver = table.solvers.empty() ? std::to_string(s) : table.solvers[static_cast<std::size_t>(s)];
    std::vector<double> finite;
    for (Eigen::Index p = 0; p < r.cols(); ++p) {
      if (std::isfinite(r(s, p))) finite.push_back(r(s, p));
    }
    std::sort(finite.begin(), finite.end());
    for (std::size_t i = 0; i < finite.size(); ++i) {
      if (i + 1 < finite.size() && finite[i + 1] == finite[i]) continue;
      c.breakpoints.push_back(finite[i]);
      c.values.push_back(static_cast<double>(i + 1) / np);
    }
    c.success_fraction = static_cast<double>(finite.size()) / np;
    out.push_back(std::move(c));
  }
  return out;
}

NfStatistics nf_statistics(const std::vector<double>& nf) {
  NfStatistics out;
  if (nf.empty()) return out;
  double sum = 0.0;
  for (double v : nf) sum += v;
  out.mean = sum / static_cast<double>(nf.size());
  double ss = 0.0;
  for (double v : nf) ss += (v - out.mean) * (v - out.mean);
  out.stddev = std::sqrt(ss / static_cast<double>(nf.size()));
  return out;
}

}  // namespace dfoto
