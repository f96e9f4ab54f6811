#include "dfoto/kkt_system.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "dfoto/errors.hpp"

namespace dfoto {

namespace {

static_assert(sizeof(lapack_int) == sizeof(int), "LAPACK built with 64-bit integers");

// Saddle matrix for displacement columns `y` (already scaled) and weight sigma.
Matrix build_matrix(const Matrix& y, double sigma) {
  const auto n = y.rows();
  const auto m = y.cols();
  Matrix w = Matrix::Zero(m + n + 1, m + n + 1);
  const Matrix gram = y.transpose() * y;
  w.topLeftCorner(m, m) = 0.5 * gram.array().square().matrix();
  w.block(m, 0, 1, m).setOnes();
  w.block(m + 1, 0, n, m) = y;
  w.topRightCorner(m, n + 1) = w.bottomLeftCorner(n + 1, m).transpose();
  for (Eigen::Index i = 0; i < n; ++i) w(m + 1 + i, m + 1 + i) = -0.5 * sigma;
  return w;
}

}  // namespace

KktSystem KktSystem::assemble(const InterpolationSet& set, double sigma) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("KktSystem::assemble: sigma must be >= 0");
  KktSystem sys;
  sys.m_ = set.size();
  sys.n_ = set.dim();
  sys.sigma_ = sigma;
  sys.base_ = set.base();
  sys.disp_ = set.displacements();

  const double radius = sys.m_ > 0 ? sys.disp_.colwise().norm().maxCoeff() : 0.0;
  if (!(radius > 0.0)) {
    throw PoisednessError("KktSystem::assemble: all points coincide with the base", 0.0);
  }
  sys.scale_ = 1.0 / radius;

  // W' = P W P with P = diag(s^2 I_m, s^-2, s^-1 I_n) is the matrix of the same problem in
  // coordinates scaled by s, with sigma' = sigma / s^2.
  const double s = sys.scale_;
  sys.factor_ = build_matrix(s * sys.disp_, sigma / (s * s));

  const auto dim = static_cast<lapack_int>(sys.factor_.rows());
  const double anorm =
      LAPACKE_dlansy(LAPACK_COL_MAJOR, '1', 'L', dim, sys.factor_.data(), dim);
  sys.pivots_.assign(static_cast<std::size_t>(dim), 0);
  const lapack_int info =
      LAPACKE_dsytrf(LAPACK_COL_MAJOR, 'L', dim, sys.factor_.data(), dim, sys.pivots_.data());
  if (info < 0) throw std::logic_error("dsytrf: illegal argument " + std::to_string(-info));
  if (info > 0) {
    throw PoisednessError("KktSystem::assemble: KKT matrix is exactly singular", 0.0);
  }
  double rcond = 0.0;
  const lapack_int cinfo = LAPACKE_dsycon(LAPACK_COL_MAJOR, 'L', dim, sys.factor_.data(), dim,
                                          sys.pivots_.data(), anorm, &rcond);
  if (cinfo != 0) throw std::logic_error("dsycon failed");
  sys.rcond_ = rcond;
  if (!(rcond >= kPoisednessRcondThreshold)) {
    throw PoisednessError(
        "KktSystem::assemble: interpolation set is not poised (rcond=" + std::to_string(rcond) +
            ")",
        rcond);
  }
  return sys;
}

Matrix KktSystem::matrix() const { return build_matrix(disp_, sigma_); }

namespace {

// z = P W'^{-1} P b
Vector solve_scaled(const Matrix& factor, const std::vector<int>& pivots, Eigen::Index m,
                    double s, Vector b) {
  const auto dim = static_cast<lapack_int>(factor.rows());
  const double s2 = s * s;
  b.head(m) *= s2;
  b[m] /= s2;
  b.tail(b.size() - m - 1) /= s;
  const lapack_int info = LAPACKE_dsytrs(LAPACK_COL_MAJOR, 'L', dim, 1, factor.data(), dim,
                                         pivots.data(), b.data(), dim);
  if (info != 0) throw PoisednessError("KktSystem::solve: factorization invalid", 0.0);
  b.head(m) *= s2;
  b[m] /= s2;
  b.tail(b.size() - m - 1) /= s;
  return b;
}

}  // namespace

KktSolution KktSystem::solve(const Vector& r) const {
  if (r.size() != m_) throw std::invalid_argument("KktSystem::solve: rhs length mismatch");
  if (!r.allFinite()) throw std::invalid_argument("KktSystem::solve: non-finite rhs");
  Vector b = Vector::Zero(m_ + n_ + 1);
  b.head(m_) = r;
  const Vector z = solve_full(b);
  return KktSolution{z.head(m_), z[m_], z.tail(n_)};
}

Vector KktSystem::solve_full(const Vector& rhs) const {
  if (factor_.size() == 0) throw PoisednessError("KktSystem::solve: not factorized", 0.0);
  if (rhs.size() != m_ + n_ + 1) throw std::invalid_argument("KktSystem::solve_full: length");
  return solve_scaled(factor_, pivots_, m_, scale_, rhs);
}

double KktSystem::residual(const KktSolution& sol, const Vector& r) const {
  Vector z(m_ + n_ + 1);
  z << sol.lambda, sol.c, sol.g;
  Vector rhs = Vector::Zero(m_ + n_ + 1);
  rhs.head(m_) = r;
  return (matrix() * z - rhs).lpNorm<Eigen::Infinity>();
}

QuadraticModel lagrange_polynomial(const KktSystem& sys, const InterpolationSet& set,
                                   Eigen::Index j) {
  if (j < 0 || j >= sys.num_points()) throw std::out_of_range("lagrange_polynomial: index");
  return from_kkt_solution(sys.solve(Vector::Unit(sys.num_points(), j)), set);
}

Vector lagrange_values(const KktSystem& sys, const Point& x) {
  // l(x) = first m entries of W^{-1} w(x), w(x) = (1/2 (y'y_i)^2, 1, y).
  const auto m = sys.num_points();
  const auto n = sys.dim();
  if (x.size() != n) throw std::invalid_argument("lagrange_values: dimension mismatch");
  const Vector y = x - sys.base();
  Vector w(m + n + 1);
  w.head(m) = 0.5 * (sys.displacements().transpose() * y).array().square().matrix();
  w[m] = 1.0;
  w.tail(n) = y;
  // Reuse the solve path with a full right-hand side.
  return sys.solve_full(w).head(m);
}

}  // namespace dfoto
