#include <random>

#include <gtest/gtest.h>

#include "dfoto/errors.hpp"
#include "dfoto/trust_region.hpp"
#include "oracles.hpp"

namespace dfoto {
namespace {

Point p2(double x, double y) { return (Point(2) << x, y).finished(); }

void expect_kkt_conditions(const Vector& g, const Matrix& h, double delta,
                           const SubproblemResult& r) {
  const Eigen::Index n = g.size();
  EXPECT_LE(r.d.norm(), delta * (1.0 + 1e-12));
  EXPECT_GE(r.predicted_reduction, 0.0);
  EXPECT_GE(r.multiplier, 0.0);
  const Matrix shifted = h + r.multiplier * Matrix::Identity(n, n);
  const double scale = 1.0 + g.norm() + h.norm();
  EXPECT_LE((shifted * r.d + g).norm(), 1e-8 * scale);
  EXPECT_GE(Eigen::SelfAdjointEigenSolver<Matrix>(shifted).eigenvalues()[0], -1e-8 * scale);
  EXPECT_LE(r.multiplier * std::abs(r.d.norm() - delta), 1e-8 * scale);
}

TEST(Subproblem, WorkedExampleStep) {
  Matrix h(2, 2);
  h << 2, -2.0 / 3, -2.0 / 3, 8.0 / 3;
  const QuadraticModel q2(Point::Zero(2), 1.0, p2(-1, -4.0 / 3), h);
  const SubproblemResult r = solve_subproblem(q2, p2(0.5, 0.5), 10.0);
  EXPECT_LE((r.d - p2(5.0 / 22, 2.0 / 11)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_FALSE(r.on_boundary);
  EXPECT_EQ(r.multiplier, 0.0);
}

TEST(Subproblem, StationaryCenterGivesZeroStep) {
  const QuadraticModel q(Point::Zero(3), 0.0, Vector::Zero(3), Matrix::Identity(3, 3));
  for (double delta : {1e-3, 1.0, 50.0}) {
    const SubproblemResult r = solve_subproblem(q, Point::Zero(3), delta);
    EXPECT_EQ(r.d.norm(), 0.0);
    EXPECT_EQ(r.predicted_reduction, 0.0);
  }
}

TEST(Subproblem, LinearModelStepsToBoundary) {
  const Vector g = (Vector(3) << 3, -4, 12).finished();
  const SubproblemResult r = solve_subproblem(g, Matrix::Zero(3, 3), 1.0);
  EXPECT_LE((r.d + g / g.norm()).norm(), 1e-10);
  EXPECT_NEAR(r.predicted_reduction, 13.0, 1e-10);
  EXPECT_TRUE(r.on_boundary);
}

TEST(Subproblem, Errors) {
  EXPECT_THROW(solve_subproblem(Vector::Ones(2), Matrix::Identity(2, 2), 0.0),
               std::invalid_argument);
  Matrix h = Matrix::Identity(2, 2);
  h(0, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(solve_subproblem(Vector::Ones(2), h, 1.0), EvaluationError);
}

TEST(Subproblem, MatchesEigenReferenceOnRandomInstances) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> radius(0.05, 3.0);
  for (int k = 0; k < 300; ++k) {
    const Eigen::Index n = 1 + k % 3;
    const Vector g = oracle::random_vector(rng, n);
    const Matrix h = oracle::random_symmetric(rng, n, 2.0);
    const double delta = radius(rng);
    const SubproblemResult r = solve_subproblem(g, h, delta);
    const oracle::TrsReference ref = oracle::trs_reference(g, h, delta);
    EXPECT_NEAR(-r.predicted_reduction, ref.value, 1e-8 * std::max(1.0, std::abs(ref.value)))
        << "instance " << k;
    expect_kkt_conditions(g, h, delta, r);
  }
}

TEST(Subproblem, HardCase) {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 60; ++k) {
    const oracle::HardCase hc = oracle::make_hard_case(rng, 2 + k % 2);
    const SubproblemResult r = solve_subproblem(hc.g, hc.h, hc.delta);
    const oracle::TrsReference ref = oracle::trs_reference(hc.g, hc.h, hc.delta);
    EXPECT_NEAR(-r.predicted_reduction, ref.value, 1e-8 * std::max(1.0, std::abs(ref.value)));
    EXPECT_TRUE(r.on_boundary);
    expect_kkt_conditions(hc.g, hc.h, hc.delta, r);
  }
}

TEST(Subproblem, ZeroGradientIndefinite) {
  Matrix h = Matrix::Zero(2, 2);
  h(0, 0) = 1.0;
  h(1, 1) = -2.0;
  const SubproblemResult r = solve_subproblem(Vector::Zero(2), h, 0.5);
  EXPECT_NEAR(std::abs(r.d[1]), 0.5, 1e-12);
  EXPECT_NEAR(r.predicted_reduction, 0.25, 1e-12);
}

TEST(Subproblem, CauchyDecrease) {
  std::mt19937_64 rng(13);
  for (int k = 0; k < 200; ++k) {
    const Eigen::Index n = 2 + k % 8;
    const Vector g = oracle::random_vector(rng, n);
    const Matrix h = oracle::random_symmetric(rng, n, 3.0);
    const double delta = 0.01 + 0.1 * (k % 20);
    const SubproblemResult r = solve_subproblem(g, h, delta);
    const double hnorm = Eigen::SelfAdjointEigenSolver<Matrix>(h).eigenvalues().cwiseAbs().maxCoeff();
    EXPECT_GE(r.predicted_reduction,
              0.5 * g.norm() * std::min(delta, g.norm() / (1.0 + hnorm)) * (1.0 - 1e-12));
  }
}

TEST(Subproblem, LargeScaleValues) {
  std::mt19937_64 rng(31);
  const Matrix h = 1e6 * oracle::random_spd(rng, 4);
  const Vector g = 1e3 * oracle::random_vector(rng, 4);
  const SubproblemResult r = solve_subproblem(g, h, 1e-4);
  const oracle::TrsReference ref = oracle::trs_reference(g, h, 1e-4);
  EXPECT_NEAR(-r.predicted_reduction, ref.value, 1e-8 * std::max(1.0, std::abs(ref.value)));
}

TEST(RadiusUpdate, Branches) {
  RadiusState s{1.0, 1e-3, 1e-8, 10.0};
  EXPECT_DOUBLE_EQ(update_radius(s, 0.05, 1.0).delta, 0.5);
  EXPECT_DOUBLE_EQ(update_radius(s, 0.9, 1.0).delta, 2.0);
  EXPECT_DOUBLE_EQ(update_radius(s, 0.4, 1.0).delta, 1.0);
  // Good ratio on an interior step keeps delta.
  EXPECT_DOUBLE_EQ(update_radius(s, 0.9, 0.3).delta, 1.0);
  // Bounds.
  RadiusState low{0.0015, 1e-3, 1e-8, 10.0};
  EXPECT_DOUBLE_EQ(update_radius(low, -3.0, 0.001).delta, 1e-3);
  RadiusState high{8.0, 1e-3, 1e-8, 10.0};
  EXPECT_DOUBLE_EQ(update_radius(high, 0.95, 8.0).delta, 10.0);
  // A NaN ratio counts as a failure.
  EXPECT_DOUBLE_EQ(update_radius(s, std::nan(""), 1.0).delta, 0.5);
}

TEST(RhoCheck, Decisions) {
  const RadiusState s{0.3, 0.1, 1e-8, 10.0};
  EXPECT_EQ(check_rho_termination(s, 0.5).decision, RhoDecision::proceed);
  const RhoCheck shrink = check_rho_termination(s, 0.01);
  EXPECT_EQ(shrink.decision, RhoDecision::shrink_rho);
  EXPECT_DOUBLE_EQ(shrink.next.rho, 0.01);
  EXPECT_GE(shrink.next.delta, shrink.next.rho);
  EXPECT_LE(shrink.next.delta, s.delta);

  const RadiusState end{1e-8, 1e-8, 1e-8, 10.0};
  EXPECT_EQ(check_rho_termination(end, 0.0).decision, RhoDecision::terminate);

  const RadiusState near_end{3e-8, 3e-8, 1e-8, 10.0};
  EXPECT_DOUBLE_EQ(check_rho_termination(near_end, 0.0).next.rho, 1e-8);
}

TEST(RhoCheck, FinitelyManyShrinks) {
  RadiusState s{0.1, 0.1, 1e-8, 100.0};
  int shrinks = 0;
  for (int guard = 0; guard < 100; ++guard) {
    const RhoCheck c = check_rho_termination(s, 0.0);
    if (c.decision == RhoDecision::terminate) break;
    EXPECT_LT(c.next.rho, s.rho);
    s = c.next;
    ++shrinks;
  }
  EXPECT_LE(shrinks, 8);
}

}  // namespace
}  // namespace dfoto
