#include "dfoto/transform_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "dfoto/errors.hpp"
#include "dfoto/kkt_system.hpp"

namespace dfoto {

MopSystem build_mop_system(const InterpolationSet& set, const QuadraticModel& q_alpha,
                           const Point& x_opt, const Vector& d_star, double delta,
                           double sigma) {
  const Eigen::Index n = set.dim();
  const Eigen::Index m = set.size();
  if (x_opt.size() != n || d_star.size() != n || q_alpha.dim() != n) {
    throw std::invalid_argument("build_mop_system: dimension mismatch");
  }
  if (!(d_star.norm() < delta)) {
    throw InconclusiveError("build_mop_system: d* is not strictly inside the trust region");
  }
  const double lam_min = Eigen::SelfAdjointEigenSolver<Matrix>(q_alpha.hessian(), Eigen::EigenvaluesOnly)
                             .eigenvalues()[0];
  if (!(lam_min > 1e-10)) {
    throw InconclusiveError("build_mop_system: model is not strictly convex");
  }

  MopSystem out;
  out.set = set;
  out.set.set_base(x_opt);
  const KktSystem sys = KktSystem::assemble(out.set, sigma);
  const Matrix y = out.set.displacements();

  // Columns j of W^{-1} restricted to the lambda and g rows.
  Matrix h_lambda(m, m);
  Matrix h_g(n, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    Vector e = Vector::Zero(m + n + 1);
    e[j] = 1.0;
    const Vector col = sys.solve_full(e);
    h_lambda.col(j) = col.head(m);
    h_g.col(j) = col.tail(n);
  }
  // Hessian of the increment applied to d*: sum_j lambda_j y_j (y_j' d*).
  const Matrix b = y * (y.transpose() * d_star).asDiagonal();
  out.coefficient_matrix = b * h_lambda + h_g;

  Vector q(m);
  for (Eigen::Index j = 0; j < m; ++j) q[j] = q_alpha.eval(out.set.point(j));
  out.offset = out.coefficient_matrix * q - q_alpha.hessian() * d_star - q_alpha.gradient_at(x_opt);
  out.q_alpha = q_alpha;
  out.x_opt = x_opt;
  out.d_star = d_star;
  out.delta = delta;
  return out;
}

MopCheck check_mop(const MopSystem& system, const Vector& values) {
  if (values.size() != system.coefficient_matrix.cols()) {
    throw std::invalid_argument("check_mop: length mismatch");
  }
  MopCheck out;
  out.residual = (system.coefficient_matrix * values - system.offset).lpNorm<Eigen::Infinity>();
  const double c_norm = system.coefficient_matrix.cwiseAbs().rowwise().sum().maxCoeff();
  out.scale = std::max({1.0, c_norm * values.lpNorm<Eigen::Infinity>(),
                        system.offset.lpNorm<Eigen::Infinity>()});
  out.satisfied = out.residual <= 1e-8 * out.scale;
  return out;
}

SolutionSpace solution_space(const MopSystem& system) {
  const Matrix& c = system.coefficient_matrix;
  Eigen::JacobiSVD<Matrix> svd(c, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector& s = svd.singularValues();
  const double threshold = 1e-10 * (s.size() > 0 ? s[0] : 0.0);
  Eigen::Index rank = 0;
  while (rank < s.size() && s[rank] > threshold) ++rank;

  SolutionSpace out;
  out.rank = rank;
  out.full_row_rank = rank == c.rows();
  const Matrix& u = svd.matrixU();
  const Matrix& v = svd.matrixV();
  out.particular = Vector::Zero(c.cols());
  for (Eigen::Index i = 0; i < rank; ++i) {
    out.particular += v.col(i) * (u.col(i).dot(system.offset) / s[i]);
  }
  out.basis = v.rightCols(c.cols() - rank);
  out.residual = (c * out.particular - system.offset).lpNorm<Eigen::Infinity>();
  return out;
}

bool in_solution_space(const MopSystem& system, const Vector& v) {
  return check_mop(system, v).satisfied;
}

namespace {

// Grid argmin inside the ball, then a compass search that only compares values.
Point ball_argmin(const std::function<double(const Point&)>& g, const Point& center, double delta,
                  int resolution, double* spacing) {
  const Eigen::Index n = center.size();
  const double h = 2.0 * delta / (resolution - 1);
  *spacing = h;
  Point best = center;
  double best_value = g(center);
  std::vector<int> idx(n, 0);
  Point x(n);
  for (;;) {
    for (Eigen::Index i = 0; i < n; ++i) x[i] = center[i] - delta + h * idx[i];
    if ((x - center).norm() <= delta) {
      const double v = g(x);
      if (v < best_value) {
        best_value = v;
        best = x;
      }
    }
    Eigen::Index k = 0;
    while (k < n && ++idx[k] == resolution) idx[k++] = 0;
    if (k == n) break;
  }
  for (double step = h; step > 1e-3 * h; step *= 0.5) {
    bool moved = true;
    while (moved) {
      moved = false;
      for (Eigen::Index i = 0; i < n; ++i) {
        for (double sign : {1.0, -1.0}) {
          Point trial = best;
          trial[i] += sign * step;
          if ((trial - center).norm() > delta) continue;
          const double v = g(trial);
          if (v < best_value) {
            best_value = v;
            best = trial;
            moved = true;
          }
        }
      }
    }
  }
  return best;
}

}  // namespace

OptimalityCheck check_objective_optimality_preserving(const Objective& f, const Transformation& t,
                                                      const Point& x_opt, double delta,
                                                      int resolution) {
  if (x_opt.size() > 3 || x_opt.size() < 1) {
    throw std::invalid_argument("check_objective_optimality_preserving: requires 1 <= n <= 3");
  }
  if (!(delta > 0.0) || resolution < 3) {
    throw std::invalid_argument("check_objective_optimality_preserving: bad radius or grid");
  }
  OptimalityCheck out;
  out.argmin_f = ball_argmin(f, x_opt, delta, resolution, &out.grid_spacing);
  out.argmin_transformed = ball_argmin([&](const Point& x) { return t(f(x)); }, x_opt, delta,
                                       resolution, &out.grid_spacing);
  out.preserved = (out.argmin_f - out.argmin_transformed).norm() <= out.grid_spacing;
  return out;
}

FullyLinearConstants fully_linear_constants(const InterpolationSet& set, const Point& x_c,
                                            double delta, double kappa_g, double kappa_f,
                                            double c1, double mu_alpha, double qtilde_hess_norm) {
  const Eigen::Index n = set.dim();
  const Eigen::Index m = set.size();
  if (!(delta > 0.0)) throw std::invalid_argument("fully_linear_constants: delta must be positive");

  Eigen::Index center = -1;
  for (Eigen::Index j = 0; j < m && center < 0; ++j) {
    if ((set.point(j) - x_c).norm() == 0.0) center = j;
  }
  if (center < 0) throw std::invalid_argument("fully_linear_constants: x_c is not in the set");

  Matrix l_hat(m - 1, n);
  for (Eigen::Index j = 0, row = 0; j < m; ++j) {
    if (j == center) continue;
    l_hat.row(row++) = (set.point(j) - x_c).transpose() / delta;
  }
  const Vector s = Eigen::JacobiSVD<Matrix>(l_hat).singularValues();
  if (s.size() < n || !(s[n - 1] > 1e-12 * s[0])) {
    throw PoisednessError("fully_linear_constants: set is not poised for linear interpolation",
                          s.size() < n ? 0.0 : s[n - 1] / s[0]);
  }

  FullyLinearConstants out;
  out.m = m;
  out.l_pinv_norm = 1.0 / s[n - 1];
  out.mu_alpha = mu_alpha;
  out.qtilde_hess_norm = qtilde_hess_norm;
  out.kappa_g = kappa_g;
  out.kappa_f = kappa_f;
  out.c1 = c1;
  const double lip = mu_alpha + qtilde_hess_norm;
  const double geo = 2.5 * std::sqrt(static_cast<double>(m - 1)) * out.l_pinv_norm;
  const double shift = std::abs(c1 - 1.0);
  out.kappa_g_hat = std::abs(c1) * kappa_g + shift * geo * lip;
  out.kappa_f_hat = std::abs(c1) * kappa_f + shift * (geo + 0.5) * lip;
  return out;
}

double gradient_lipschitz(const QuadraticModel& q) {
  const Vector ev =
      Eigen::SelfAdjointEigenSolver<Matrix>(q.hessian(), Eigen::EigenvaluesOnly).eigenvalues();
  return ev.size() == 0 ? 0.0 : std::max(std::abs(ev[0]), std::abs(ev[ev.size() - 1]));
}

}  // namespace dfoto
