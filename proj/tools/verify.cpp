#include "verify.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "dfoto/errors.hpp"
#include "dfoto/kkt_system.hpp"
#include "dfoto/model_update.hpp"
#include "dfoto/trust_region.hpp"

namespace dfoto::verify {

namespace {

double coeff_gap(const QuadraticModel& a, const QuadraticModel& b) {
  const QuadraticModel c = b.rebased(a.base());
  double gap = std::abs(a.constant() - c.constant());
  gap = std::max(gap, (a.gradient() - c.gradient()).cwiseAbs().maxCoeff());
  gap = std::max(gap, (a.hessian() - c.hessian()).cwiseAbs().maxCoeff());
  return gap;
}

double coeff_scale(const QuadraticModel& a) {
  return std::max({1.0, std::abs(a.constant()), a.gradient().cwiseAbs().maxCoeff(),
                   a.hessian().cwiseAbs().maxCoeff()});
}

QuadraticModel model_2d(double c, double gx, double gy, double hxx, double hxy, double hyy) {
  Matrix h(2, 2);
  h << hxx, hxy, hxy, hyy;
  return QuadraticModel(Point::Zero(2), c, (Vector(2) << gx, gy).finished(), h);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

CheckLine line(const std::string& name, double err, double tol) {
  return {name, err <= tol, "max error " + fmt(err)};
}

struct Instance {
  InterpolationSet set;
  QuadraticModel q_alpha;
  Vector f;
};

Instance random_instance(std::mt19937_64& rng, bool convex) {
  std::uniform_int_distribution<int> dim(2, 4);
  std::normal_distribution<double> normal;
  const Eigen::Index n = dim(rng);
  std::uniform_int_distribution<Eigen::Index> size(n + 2, std::min<Eigen::Index>(10, (n + 1) * (n + 2) / 2));
  const Eigen::Index m = size(rng);
  Matrix pts(n, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) pts(i, j) = normal(rng);
  }
  Point base(n);
  for (Eigen::Index i = 0; i < n; ++i) base[i] = 0.3 * normal(rng);
  Matrix h(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < n; ++k) h(i, k) = normal(rng);
  }
  h = convex ? Matrix(h * h.transpose() + Matrix::Identity(n, n)) : Matrix(h + h.transpose());
  Vector g(n);
  for (Eigen::Index i = 0; i < n; ++i) g[i] = normal(rng);
  Vector f(m);
  for (Eigen::Index j = 0; j < m; ++j) f[j] = 3.0 * normal(rng);
  return {InterpolationSet(pts, base), QuadraticModel(base, normal(rng), g, h), f};
}

}  // namespace

MopSystem example21_system() {
  std::vector<Point> pts = {Point::Zero(2), Point::Unit(2, 0), Point::Unit(2, 1),
                            -Point::Unit(2, 0), Point::Constant(2, 0.5)};
  const InterpolationSet set(pts, Point::Constant(2, 0.5));
  const QuadraticModel q1 = model_2d(1, -1, -1, 2, 0, 2);
  const Vector d_star = (Vector(2) << 5.0 / 22.0, 2.0 / 11.0).finished();
  return build_mop_system(set, q1, Point::Constant(2, 0.5), d_star, 10.0);
}

std::vector<CheckLine> example21() {
  std::vector<CheckLine> out;
  const double tol = 1e-10;

  // First set about the origin, values of f at the five points.
  std::vector<Point> first = {Point::Zero(2), Point::Unit(2, 0), Point::Unit(2, 1),
                              -Point::Unit(2, 0), -Point::Unit(2, 1)};
  InterpolationSet set1(first, Point::Zero(2));
  const Vector f1 = (Vector(5) << 1, 1, 1, 3, 3).finished();
  const KktSystem sys1 = KktSystem::assemble(set1);
  const KktSolution s1 = sys1.solve(f1);
  const Vector lambda1 = (Vector(5) << -4, 1, 1, 1, 1).finished();
  double err = (s1.lambda - lambda1).cwiseAbs().maxCoeff();
  err = std::max({err, std::abs(s1.c - 1.0), (s1.g - Vector::Constant(2, -1.0)).cwiseAbs().maxCoeff()});
  out.push_back(line("first KKT solve (lambda, c, g)", err, tol));

  const QuadraticModel q1 = least_frobenius_model(QuadraticModel::zero(2), set1, f1);
  out.push_back(line("first model 1 - x - y + x^2 + y^2", coeff_gap(model_2d(1, -1, -1, 2, 0, 2), q1), tol));

  // Second set: x_new = (1/2, 1/2) takes the slot of (0, -1), base moved to x_new.
  std::vector<Point> second = {Point::Zero(2), Point::Unit(2, 0), Point::Unit(2, 1),
                               -Point::Unit(2, 0), Point::Constant(2, 0.5)};
  InterpolationSet set2(second, Point::Constant(2, 0.5));
  const Vector f2 = (Vector(5) << 1, 1, 1, 3, 0.25).finished();
  const Vector f_prev = (Vector(5) << 1, 1, 1, 3, 3).finished();
  const UpdateInputs in{q1, set2, f2, f_prev, 4, UpdateMode::trans};
  const Vector r = build_residual(in);
  out.push_back(line("second residual r_t = -1/4", std::abs(r[4] + 0.25) + r.head(4).cwiseAbs().maxCoeff(), tol));

  const KktSystem sys2 = KktSystem::assemble(set2);
  const KktSolution s2 = sys2.solve(r);
  const Vector lambda2 = (Vector(5) << 2.0 / 3, 1, 4.0 / 3, -1.0 / 3, -8.0 / 3).finished();
  err = (s2.lambda - lambda2).cwiseAbs().maxCoeff();
  err = std::max({err, std::abs(s2.c + 0.25), (s2.g - Vector::Constant(2, -1.0 / 3)).cwiseAbs().maxCoeff()});
  out.push_back(line("second KKT solve (lambda, c, g)", err, tol));

  const QuadraticModel d = from_kkt_solution(s2, set2);
  out.push_back(line("increment -2/3 xy + 1/3 y^2 - 1/3 y",
                     coeff_gap(model_2d(0, 0, -1.0 / 3, 0, -2.0 / 3, 2.0 / 3), d), tol));

  const QuadraticModel q2 = update(in);
  const QuadraticModel q2_ref = model_2d(1, -1, -4.0 / 3, 2, -2.0 / 3, 8.0 / 3);
  out.push_back(line("second model", coeff_gap(q2_ref, q2), tol));

  const SubproblemResult sub = solve_subproblem(q2, Point::Constant(2, 0.5), 10.0);
  const Vector d_star = (Vector(2) << 5.0 / 22, 2.0 / 11).finished();
  out.push_back(line("trust-region step (5/22, 2/11)", (sub.d - d_star).cwiseAbs().maxCoeff(), tol));
  const Point next = Point::Constant(2, 0.5) + sub.d;
  const Point next_ref = (Point(2) << 8.0 / 11, 15.0 / 22).finished();
  out.push_back(line("next point (8/11, 15/22)", (next - next_ref).cwiseAbs().maxCoeff(), tol));

  // Conditions in the ordering (x1, x2, x3, x4, x_new).
  const MopSystem sys = example21_system();
  const Matrix& c = sys.coefficient_matrix;
  const Matrix c45 = c.rightCols(2);
  const Matrix t_coef = -c45.lu().solve(c.leftCols(3));
  const Vector t_const = c45.lu().solve(sys.offset);
  Matrix coef_ref(2, 3);
  coef_ref << 9.0 / 10, -27.0 / 5, 11.0 / 2, 33.0 / 40, 21.0 / 20, -7.0 / 8;
  const Vector const_ref = (Vector(2) << 2.0, -0.75).finished();
  err = std::max((t_coef - coef_ref).cwiseAbs().maxCoeff(), (t_const - const_ref).cwiseAbs().maxCoeff());
  out.push_back(line("optimality conditions solved for T(f(x4)), T(f(x_new))", err, 1e-9));

  const SolutionSpace space = solution_space(sys);
  bool ok = space.basis.cols() == 3;
  const Vector particular = (Vector(5) << 0, 0, 0, 2, -0.75).finished();
  ok = ok && in_solution_space(sys, particular);
  const Matrix proj = space.basis * space.basis.transpose();
  double span_err = 0.0;
  for (const Vector& dir : {Vector((Vector(5) << 40, 0, 0, 36, 33).finished()),
                            Vector((Vector(5) << 0, 20, 0, -108, 21).finished()),
                            Vector((Vector(5) << 0, 0, 8, 44, -7).finished())}) {
    span_err = std::max(span_err, (dir - proj * dir).norm() / dir.norm());
  }
  out.push_back({"solution space: particular point and three directions", ok && span_err <= 1e-9,
                 "dimension " + std::to_string(space.basis.cols()) + ", span error " + fmt(span_err)});

  const Vector values = (Vector(5) << 1, 1, 1, 3, 0.25).finished();
  const bool orig = check_mop(sys, values).satisfied;
  const bool shifted = check_mop(sys, (values.array() + 7.0).matrix()).satisfied;
  const bool doubled = check_mop(sys, 2.0 * values).satisfied;
  out.push_back({"original and translated values satisfy, doubled do not", orig && shifted && !doubled,
                 std::string(orig ? "1" : "0") + (shifted ? "1" : "0") + (doubled ? "1" : "0")});
  return out;
}

std::vector<CheckLine> identities(std::uint64_t seed, int instances) {
  std::mt19937_64 rng(seed);
  const double c1s[] = {-2, -1, 0, 0.5, 1, 3};
  const double c2s[] = {-10, 0, 7};
  double e35 = 0.0, e36 = 0.0, e37 = 0.0, e38 = 0.0;
  std::normal_distribution<double> normal;
  for (int k = 0; k < instances; ++k) {
    const Instance in = random_instance(rng, false);
    const Eigen::Index n = in.set.dim();
    const QuadraticModel zero = QuadraticModel::zero(n);
    const double c1 = c1s[k % 6];
    const double c2 = c2s[(k / 6) % 3];
    const Vector g = (c1 * in.f.array() + c2).matrix();
    auto m = [&](const QuadraticModel& base, const Vector& v) {
      return least_frobenius_model(base, in.set, v);
    };

    const QuadraticModel lhs35 = m(in.q_alpha, g);
    const QuadraticModel rhs35 = m(in.q_alpha, in.f).scaled(c1).shifted(c2) +
                                 (m(zero, values_at(in.q_alpha, in.set)) + (-in.q_alpha)).scaled(c1 - 1.0);
    e35 = std::max(e35, coeff_gap(lhs35, rhs35) / coeff_scale(lhs35));

    const QuadraticModel lin(in.q_alpha.base(), in.q_alpha.constant(), in.q_alpha.gradient(),
                             Matrix::Zero(n, n));
    e36 = std::max(e36, coeff_gap(m(lin, g), m(lin, in.f).scaled(c1).shifted(c2)) /
                            coeff_scale(m(lin, g)));

    const double nu1 = normal(rng) * 2.0;
    const double nu2 = normal(rng) * 5.0;
    const QuadraticModel lhs37 = m(in.q_alpha.scaled(nu1).shifted(nu2), in.f);
    const QuadraticModel rhs37 = m(in.q_alpha, in.f).scaled(nu1) + m(zero, in.f).scaled(1.0 - nu1);
    e37 = std::max(e37, coeff_gap(lhs37, rhs37) / coeff_scale(lhs37));

    // Q-hat interpolates f everywhere except one point.
    Vector f_hat = in.f;
    f_hat[0] += 1.0 + std::abs(normal(rng));
    const QuadraticModel q_hat = m(in.q_alpha, f_hat);
    const QuadraticModel lhs38 = m(q_hat.scaled(c1).shifted(c2), g) + (-m(zero, g));
    const QuadraticModel rhs38 = (m(q_hat, g) + (-m(zero, g))).scaled(c1);
    e38 = std::max(e38, coeff_gap(lhs38, rhs38) / coeff_scale(lhs38));
  }
  return {line("affine values, quadratic base", e35, 1e-9), line("affine values, linear base", e36, 1e-9),
          line("affine base model", e37, 1e-9), line("affine base interpolating all but one point", e38, 1e-9)};
}

std::vector<CheckLine> mop(std::uint64_t seed, int instances) {
  std::mt19937_64 rng(seed);
  int built = 0, scalable = 0, identity_ok = 0, translation_ok = 0, null_ok = 0, doubled_fail = 0;
  for (int k = 0; k < instances; ++k) {
    Instance in = random_instance(rng, true);
    const QuadraticModel model = least_frobenius_model(in.q_alpha, in.set, in.f);
    const Point x_opt = in.set.point(argmin_index(in.f));
    if (gradient_lipschitz(model) <= 0.0 ||
        Eigen::SelfAdjointEigenSolver<Matrix>(model.hessian()).eigenvalues()[0] <= 1e-6) {
      continue;
    }
    // Unconstrained minimizer step of the model, inside a generous radius.
    const Vector d_star = model.hessian().ldlt().solve(-model.gradient_at(x_opt));
    try {
      const MopSystem sys = build_mop_system(in.set, in.q_alpha, x_opt, d_star, 2.0 * d_star.norm() + 1.0);
      ++built;
      if (check_mop(sys, in.f).satisfied) ++identity_ok;
      if (check_mop(sys, (in.f.array() + 7.0).matrix()).satisfied) ++translation_ok;
      const SolutionSpace space = solution_space(sys);
      Vector v = in.f;
      for (Eigen::Index j = 0; j < space.basis.cols(); ++j) v += 3.0 * space.basis.col(j);
      if (check_mop(sys, v).satisfied) ++null_ok;
      // Scaling can only break the conditions when M_0(Q_alpha) differs from Q_alpha.
      const QuadraticModel q_tilde =
          least_frobenius_model(QuadraticModel::zero(in.set.dim()), in.set, values_at(in.q_alpha, in.set));
      if (coeff_gap(in.q_alpha, q_tilde) > 1e-8 * coeff_scale(in.q_alpha)) {
        ++scalable;
        if (!check_mop(sys, 2.0 * in.f).satisfied) ++doubled_fail;
      }
    } catch (const InconclusiveError&) {
    }
  }
  const std::string of = "/" + std::to_string(built);
  return {{"original values satisfy their conditions", built > 0 && identity_ok == built,
           std::to_string(identity_ok) + of},
          {"translated values satisfy", built > 0 && translation_ok == built, std::to_string(translation_ok) + of},
          {"null-space moves preserve membership", built > 0 && null_ok == built, std::to_string(null_ok) + of},
          {"doubled values fail in >= 95%", scalable > 0 && doubled_fail >= 0.95 * scalable,
           std::to_string(doubled_fail) + "/" + std::to_string(scalable)}};
}

}  // namespace dfoto::verify
