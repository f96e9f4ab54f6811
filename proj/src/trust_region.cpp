#include "dfoto/trust_region.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "dfoto/errors.hpp"

namespace dfoto {

namespace {

constexpr int kMaxNewtonIterations = 200;
constexpr double kBoundaryTolerance = 1e-12;

double model_change(const Vector& g, const Matrix& h, const Vector& d) {
  return g.dot(d) + 0.5 * d.dot(h * d);
}

// Moves p along v until ||p + tau v|| = delta, picking the root with the lower model value.
Vector to_boundary(const Vector& g, const Matrix& h, const Vector& p, const Vector& v,
                   double delta) {
  const double pv = p.dot(v);
  const double disc = std::sqrt(std::max(0.0, pv * pv + delta * delta - p.squaredNorm()));
  const Vector d1 = p + (-pv + disc) * v;
  const Vector d2 = p + (-pv - disc) * v;
  return model_change(g, h, d1) <= model_change(g, h, d2) ? d1 : d2;
}

SubproblemResult finish(const Vector& g, const Matrix& h, Vector d, double delta, double mu) {
  const double norm = d.norm();
  if (norm > delta) d *= delta / norm;
  SubproblemResult out;
  out.predicted_reduction = -model_change(g, h, d);
  if (!(out.predicted_reduction >= 0.0)) {
    d.setZero();
    out.predicted_reduction = 0.0;
    mu = 0.0;
  }
  out.on_boundary = d.norm() >= delta * (1.0 - 1e-8);
  out.multiplier = out.on_boundary ? mu : 0.0;
  out.d = std::move(d);
  return out;
}

}  // namespace

SubproblemResult solve_subproblem(const Vector& g, const Matrix& hessian, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("solve_subproblem: delta must be positive");
  const auto n = g.size();
  if (hessian.rows() != n || hessian.cols() != n) {
    throw std::invalid_argument("solve_subproblem: dimension mismatch");
  }
  if (!g.allFinite() || !hessian.allFinite()) {
    throw EvaluationError("solve_subproblem: non-finite model coefficients", g);
  }
  const Matrix h = 0.5 * (hessian + hessian.transpose());
  if (n == 0) return SubproblemResult{Vector(), 0.0, false, 0.0};

  Eigen::SelfAdjointEigenSolver<Matrix> eig(h);
  const Vector& evals = eig.eigenvalues();
  const double lam_min = evals[0];
  const double hnorm = std::max(std::abs(evals[0]), std::abs(evals[n - 1]));
  const double gnorm = g.norm();
  const Matrix eye = Matrix::Identity(n, n);

  // Interior Newton step.
  if (lam_min > 0.0) {
    Eigen::LLT<Matrix> llt(h);
    if (llt.info() == Eigen::Success) {
      Vector d = -llt.solve(g);
      if (d.norm() <= delta) return finish(g, h, std::move(d), delta, 0.0);
    }
  } else if (gnorm == 0.0 && lam_min == 0.0) {
    return finish(g, h, Vector::Zero(n), delta, 0.0);
  }

  const double mu_lo = std::max(0.0, -lam_min);
  double lo = mu_lo;
  double hi = std::max(mu_lo, gnorm / delta - lam_min);
  hi += 1e-12 * std::max(1.0, hi) + 1e-300;

  // Probe just above the lower bound; failure to exceed delta there is the hard case.
  double tiny = 1e-13 * std::max(1.0, hnorm);
  double mu = mu_lo > 0.0 ? mu_lo + tiny : (lam_min > 0.0 ? 0.0 : tiny);
  Eigen::LLT<Matrix> llt;
  for (int attempt = 0;; ++attempt) {
    llt.compute(h + mu * eye);
    if (llt.info() == Eigen::Success || attempt > 40) break;
    tiny *= 10.0;
    mu = mu_lo + tiny;
  }
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("solve_subproblem: cannot factorize shifted Hessian");
  }
  Vector d = -llt.solve(g);
  double norm = d.norm();

  if (norm < delta) {
    // Hard case: remove the eigenspace of lam_min and reach the boundary along it.
    const double cluster = lam_min + 1e-10 * std::max(1.0, hnorm);
    Eigen::Index k = 0;
    while (k < n && evals[k] <= cluster) ++k;
    const Matrix basis = eig.eigenvectors().leftCols(k);
    const Vector g_perp = g - basis * (basis.transpose() * g);
    Vector p = -llt.solve(g_perp);
    p -= basis * (basis.transpose() * p);
    if (p.norm() >= delta) {
      // Numerically not the hard case after all: fall through to the root finder.
      d = -llt.solve(g);
    } else {
      return finish(g, h, to_boundary(g, h, p, basis.col(0), delta), delta, mu_lo);
    }
  }

  for (int it = 0; it < kMaxNewtonIterations; ++it) {
    norm = d.norm();
    if (std::abs(norm - delta) <= kBoundaryTolerance * delta) break;
    if (norm > delta) {
      lo = mu;
    } else {
      hi = mu;
    }
    const Vector w = llt.matrixL().solve(d);
    double next = mu + (norm / w.norm()) * (norm / w.norm()) * (norm - delta) / delta;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (hi - lo <= 1e-15 * std::max(1.0, hi)) break;
    mu = next;
    llt.compute(h + mu * eye);
    if (llt.info() != Eigen::Success) {
      lo = mu;
      mu = 0.5 * (lo + hi);
      llt.compute(h + mu * eye);
      if (llt.info() != Eigen::Success) break;
    }
    d = -llt.solve(g);
  }
  norm = d.norm();
  if (norm < delta * (1.0 - 1e-10) && lam_min < 0.0) {
    d = to_boundary(g, h, d, eig.eigenvectors().col(0), delta);
  }
  return finish(g, h, std::move(d), delta, mu);
}

SubproblemResult solve_subproblem(const QuadraticModel& model, const Point& center, double delta) {
  return solve_subproblem(model.gradient_at(center), model.hessian(), delta);
}

RadiusState update_radius(const RadiusState& state, double ratio, double step_norm) {
  RadiusState next = state;
  const bool boundary = step_norm >= state.delta * (1.0 - 1e-6);
  if (!(ratio >= RadiusPolicy::kShrinkBelow)) {
    next.delta = std::max(state.rho, state.delta * RadiusPolicy::kShrinkFactor);
  } else if (ratio > RadiusPolicy::kGrowAbove && boundary) {
    next.delta = std::min(state.delta * RadiusPolicy::kGrowFactor, state.delta_max);
  }
  next.delta = std::max(next.delta, next.rho);
  return next;
}

RhoCheck check_rho_termination(const RadiusState& state, double step_norm) {
  // A boundary step with delta == rho may fall short of rho by rounding.
  if (step_norm >= state.rho * (1.0 - 1e-10)) return {RhoDecision::proceed, state};
  if (state.rho <= state.rho_end) return {RhoDecision::terminate, state};
  RadiusState next = state;
  next.rho = std::max(state.rho_end, state.rho / RadiusPolicy::kRhoFactor);
  next.delta = std::max(next.rho, std::min(state.delta, 0.5 * state.rho));
  return {RhoDecision::shrink_rho, next};
}

RhoCheck check_rho_termination(const RadiusState& state, const SubproblemResult& sub) {
  return check_rho_termination(state, sub.d.norm());
}

}  // namespace dfoto
