#pragma once

// Independent reference computations used by the unit and acceptance tests.
// Nothing here calls into the KKT or subproblem code under test.

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "dfoto/quad_model.hpp"

namespace dfoto::oracle {

inline Matrix random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols,
                            double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Matrix a(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) a(i, j) = normal(rng);
  }
  return a;
}

inline Vector random_vector(std::mt19937_64& rng, Eigen::Index n, double scale = 1.0) {
  return random_matrix(rng, n, 1, scale).col(0);
}

inline Matrix random_symmetric(std::mt19937_64& rng, Eigen::Index n, double scale = 1.0) {
  const Matrix a = random_matrix(rng, n, n, scale);
  return 0.5 * (a + a.transpose());
}

inline Matrix random_spd(std::mt19937_64& rng, Eigen::Index n, double shift = 1.0) {
  const Matrix a = random_matrix(rng, n, n);
  return a * a.transpose() + shift * Matrix::Identity(n, n);
}

inline QuadraticModel random_quadratic(std::mt19937_64& rng, Eigen::Index n, const Point& base) {
  std::normal_distribution<double> normal;
  return QuadraticModel(base, normal(rng), random_vector(rng, n), random_symmetric(rng, n));
}

/// Largest coefficient difference between two quadratics, compared about a's base.
inline double coefficient_gap(const QuadraticModel& a, const QuadraticModel& b) {
  const QuadraticModel c = b.rebased(a.base());
  double gap = std::abs(a.constant() - c.constant());
  gap = std::max(gap, (a.gradient() - c.gradient()).cwiseAbs().maxCoeff());
  gap = std::max(gap, (a.hessian() - c.hessian()).cwiseAbs().maxCoeff());
  return gap;
}

/// argmin ||H - H_base||_F over quadratics with Q(x_j) = values_j, found by
/// parametrizing Q by (c, g, upper triangle of H) about the base model's base,
/// taking the general solution of the interpolation equations through a null
/// space, and solving the weighted least-squares problem in that null space.
/// Off-diagonal Hessian entries carry weight 2 in the squared norm.
inline QuadraticModel frobenius_ls_model(const QuadraticModel& base_model, const Matrix& points,
                                         const Vector& values) {
  const Eigen::Index n = points.rows();
  const Eigen::Index m = points.cols();
  const Eigen::Index nh = n * (n + 1) / 2;
  const Eigen::Index p = 1 + n + nh;
  const Point& x0 = base_model.base();

  Matrix rows(m, p);
  for (Eigen::Index j = 0; j < m; ++j) {
    const Vector y = points.col(j) - x0;
    rows(j, 0) = 1.0;
    rows.block(j, 1, 1, n) = y.transpose();
    Eigen::Index k = 1 + n;
    for (Eigen::Index a = 0; a < n; ++a) {
      for (Eigen::Index b = a; b < n; ++b, ++k) {
        rows(j, k) = (a == b) ? 0.5 * y[a] * y[a] : y[a] * y[b];
      }
    }
  }
  Vector weights = Vector::Zero(p);
  Vector h0(p);
  h0.setZero();
  {
    Eigen::Index k = 1 + n;
    for (Eigen::Index a = 0; a < n; ++a) {
      for (Eigen::Index b = a; b < n; ++b, ++k) {
        weights[k] = (a == b) ? 1.0 : std::sqrt(2.0);
        h0[k] = base_model.hessian()(a, b);
      }
    }
  }

  // General solution of rows * q = values: q = q1 + Z y.
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(rows);
  const Vector q1 = cod.solve(values);
  Eigen::FullPivLU<Matrix> lu(rows);
  const Matrix z = lu.kernel();
  Vector q = q1;
  if (lu.rank() < p) {
    const Matrix wz = weights.asDiagonal() * z;
    const Vector rhs = -(weights.asDiagonal() * (q1 - h0));
    const Vector y = wz.colPivHouseholderQr().solve(rhs);
    q = q1 + z * y;
  }

  Vector g = q.segment(1, n);
  Matrix h(n, n);
  Eigen::Index k = 1 + n;
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = a; b < n; ++b, ++k) {
      h(a, b) = q[k];
      h(b, a) = q[k];
    }
  }
  return QuadraticModel(x0, q[0], g, h);
}

/// Exact trust-region minimum value of g'd + 1/2 d'Hd over ||d|| <= delta from an
/// eigendecomposition, with the secular equation solved by bisection.
struct TrsReference {
  Vector d;
  double value = 0.0;
};

inline double quadratic_value(const Vector& g, const Matrix& h, const Vector& d) {
  return g.dot(d) + 0.5 * d.dot(h * d);
}

inline TrsReference trs_reference(const Vector& g, const Matrix& h, double delta) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(h);
  const Vector lam = eig.eigenvalues();
  const Matrix v = eig.eigenvectors();
  const Vector gh = v.transpose() * g;
  const Eigen::Index n = g.size();
  const double lmin = lam[0];

  auto step = [&](double mu) {
    Vector c(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double den = lam[i] + mu;
      c[i] = den > 0.0 ? -gh[i] / den : 0.0;
    }
    return c;
  };

  TrsReference out;
  if (lmin > 0.0) {
    const Vector c = step(0.0);
    if (c.norm() <= delta) {
      out.d = v * c;
      out.value = quadratic_value(g, h, out.d);
      return out;
    }
  }

  const double lo0 = std::max(0.0, -lmin);
  const double tiny = 1e-13 * std::max(1.0, lam.cwiseAbs().maxCoeff());
  // Hard case: the components along the lowest eigenspace vanish and the shifted
  // solution stays inside the ball.
  bool hard = true;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (lam[i] <= lmin + tiny && std::abs(gh[i]) > 1e-12 * std::max(1.0, gh.norm())) hard = false;
  }
  if (hard && lmin <= 0.0) {
    // mu = -lmin; the remaining length goes along the lowest eigenvector.
    Vector c = Vector::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (lam[i] > lmin + tiny) c[i] = -gh[i] / (lam[i] + lo0);
    }
    if (c.norm() <= delta) {
      const double tau = std::sqrt(std::max(0.0, delta * delta - c.squaredNorm()));
      const Vector d1 = v * c + tau * v.col(0);
      const Vector d2 = v * c - tau * v.col(0);
      out.d = quadratic_value(g, h, d1) <= quadratic_value(g, h, d2) ? d1 : d2;
      out.value = quadratic_value(g, h, out.d);
      return out;
    }
  }

  double lo = lo0;
  double hi = lo0 + g.norm() / delta + lam.cwiseAbs().maxCoeff() + 1.0;
  while (step(hi).norm() > delta) hi *= 2.0;
  for (int it = 0; it < 400 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (step(mid).norm() > delta ? lo : hi) = mid;
  }
  out.d = v * step(hi);
  out.value = quadratic_value(g, h, out.d);
  return out;
}

/// A hard-case instance: g orthogonal to the lowest eigenvector of an indefinite
/// H, scaled so the shifted solution lies strictly inside the ball.
struct HardCase {
  Vector g;
  Matrix h;
  double delta = 1.0;
};

inline HardCase make_hard_case(std::mt19937_64& rng, Eigen::Index n) {
  std::uniform_real_distribution<double> unif(0.5, 3.0);
  const Matrix q = random_matrix(rng, n, n).householderQr().householderQ();
  Vector lam(n);
  lam[0] = -unif(rng);
  for (Eigen::Index i = 1; i < n; ++i) lam[i] = lam[0] + unif(rng);
  HardCase hc;
  hc.h = q * lam.asDiagonal() * q.transpose();
  hc.h = 0.5 * (hc.h + hc.h.transpose());
  Vector gh = random_vector(rng, n);
  gh[0] = 0.0;
  hc.g = q * gh;
  // ||(H - lam0 I)^+ g|| is the interior part; make the radius larger.
  Vector c(n);
  c[0] = 0.0;
  for (Eigen::Index i = 1; i < n; ++i) c[i] = gh[i] / (lam[i] - lam[0]);
  hc.delta = c.norm() * (1.5 + unif(rng));
  if (hc.delta == 0.0) hc.delta = 1.0;
  return hc;
}

}  // namespace dfoto::oracle
