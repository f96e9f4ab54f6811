#include <random>

#include <gtest/gtest.h>

#include "dfoto/errors.hpp"
#include "dfoto/kkt_system.hpp"
#include "dfoto/model_update.hpp"
#include "oracles.hpp"

namespace dfoto {
namespace {

Point p2(double x, double y) { return (Point(2) << x, y).finished(); }

InterpolationSet first_set() {
  return InterpolationSet({p2(0, 0), p2(1, 0), p2(0, 1), p2(-1, 0), p2(0, -1)}, p2(0, 0));
}

InterpolationSet random_set(std::mt19937_64& rng, Eigen::Index n, Eigen::Index m) {
  return InterpolationSet(oracle::random_matrix(rng, n, m), oracle::random_vector(rng, n, 0.3));
}

TEST(KktSystem, BlockEntries) {
  const KktSystem sys = KktSystem::assemble(first_set());
  const Matrix w = sys.matrix();
  ASSERT_EQ(w.rows(), 8);
  // Second and fourth points: 1/2 ((1,0).(1,0))^2 and 1/2 ((1,0).(-1,0))^2.
  EXPECT_DOUBLE_EQ(w(1, 1), 0.5);
  EXPECT_DOUBLE_EQ(w(1, 3), 0.5);
  EXPECT_DOUBLE_EQ(w(1, 2), 0.0);
  EXPECT_DOUBLE_EQ(w(5, 0), 1.0);
  EXPECT_DOUBLE_EQ(w(6, 3), -1.0);
  EXPECT_EQ(w, w.transpose());
  EXPECT_EQ(w.bottomRightCorner(3, 3).norm(), 0.0);
}

TEST(KktSystem, WeightedLowerRightBlock) {
  const KktSystem sys = KktSystem::assemble(first_set(), 2.0);
  const Matrix z = sys.matrix().bottomRightCorner(3, 3);
  Matrix ref = Matrix::Zero(3, 3);
  ref(1, 1) = -1.0;
  ref(2, 2) = -1.0;
  EXPECT_EQ(z, ref);
}

TEST(KktSystem, WorkedExampleFirstSolve) {
  const KktSystem sys = KktSystem::assemble(first_set());
  const KktSolution s = sys.solve((Vector(5) << 1, 1, 1, 3, 3).finished());
  EXPECT_LE((s.lambda - (Vector(5) << -4, 1, 1, 1, 1).finished()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(s.c, 1.0, 1e-12);
  EXPECT_LE((s.g - p2(-1, -1)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(KktSystem, WorkedExampleSecondSolve) {
  const InterpolationSet set({p2(0, 0), p2(1, 0), p2(0, 1), p2(-1, 0), p2(0.5, 0.5)}, p2(0.5, 0.5));
  const KktSystem sys = KktSystem::assemble(set);
  const KktSolution s = sys.solve((Vector(5) << 0, 0, 0, 0, -0.25).finished());
  const Vector lambda = (Vector(5) << 2.0 / 3, 1, 4.0 / 3, -1.0 / 3, -8.0 / 3).finished();
  EXPECT_LE((s.lambda - lambda).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(s.c, -0.25, 1e-12);
  EXPECT_LE((s.g - p2(-1.0 / 3, -1.0 / 3)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(KktSystem, ZeroRightHandSide) {
  const KktSolution s = KktSystem::assemble(first_set()).solve(Vector::Zero(5));
  EXPECT_EQ(s.lambda.norm() + std::abs(s.c) + s.g.norm(), 0.0);
}

TEST(KktSystem, DuplicatePointIsNotPoised) {
  const InterpolationSet set({p2(0, 0), p2(1, 0), p2(0, 1), p2(1, 0), p2(0, -1)}, p2(0, 0));
  EXPECT_THROW(KktSystem::assemble(set), PoisednessError);
}

TEST(KktSystem, CollinearPointsAreNotPoised) {
  const InterpolationSet set({p2(0, 0), p2(1, 0), p2(2, 0), p2(3, 0), p2(4, 0)}, p2(0, 0));
  EXPECT_THROW(KktSystem::assemble(set), PoisednessError);
}

TEST(KktSystem, NegativeSigmaRejected) {
  EXPECT_THROW(KktSystem::assemble(first_set(), -1.0), std::invalid_argument);
}

TEST(KktSystem, SolutionPropertiesOnRandomSets) {
  std::mt19937_64 rng(21);
  for (int k = 0; k < 40; ++k) {
    const Eigen::Index n = 2 + k % 3;
    const Eigen::Index m = std::min<Eigen::Index>(n + 2 + k % 4, (n + 1) * (n + 2) / 2);
    const InterpolationSet set = random_set(rng, n, m);
    const KktSystem sys = KktSystem::assemble(set);
    const Vector r = oracle::random_vector(rng, m, 5.0);
    const KktSolution s = sys.solve(r);
    const double scale = std::max(1.0, s.lambda.cwiseAbs().maxCoeff());
    EXPECT_LE(std::abs(s.lambda.sum()), 1e-9 * scale);
    EXPECT_LE((set.displacements() * s.lambda).cwiseAbs().maxCoeff(), 1e-9 * scale);
    EXPECT_LE(sys.residual(s, r), 1e-9 * (1.0 + r.cwiseAbs().maxCoeff()));

    // Linearity in r.
    const KktSolution s3 = sys.solve(3.0 * r);
    EXPECT_LE((s3.lambda - 3.0 * s.lambda).cwiseAbs().maxCoeff(), 1e-9 * scale);
    EXPECT_NEAR(s3.c, 3.0 * s.c, 1e-9 * std::max(1.0, std::abs(s.c)));
  }
}

TEST(KktSystem, MatchesNullSpaceOracle) {
  std::mt19937_64 rng(8);
  for (int k = 0; k < 30; ++k) {
    const Eigen::Index n = 2 + k % 3;
    const Eigen::Index m = std::min<Eigen::Index>(n + 2 + (k * 7) % 6, (n + 1) * (n + 2) / 2);
    const InterpolationSet set = random_set(rng, n, m);
    const Vector r = oracle::random_vector(rng, m, 2.0);
    const QuadraticModel d = from_kkt_solution(KktSystem::assemble(set).solve(r), set);
    const QuadraticModel ref =
        oracle::frobenius_ls_model(QuadraticModel(set.base()), set.points(), r);
    EXPECT_LE(oracle::coefficient_gap(ref, d), 1e-8) << "instance " << k;
  }
}

TEST(KktSystem, TinySetsStayWellScaled) {
  std::mt19937_64 rng(4);
  const Matrix pts = 1e-7 * oracle::random_matrix(rng, 3, 7);
  const InterpolationSet set(pts, Point::Zero(3));
  const KktSystem sys = KktSystem::assemble(set);
  EXPECT_GT(sys.rcond(), 1e-6);
  const Vector r = oracle::random_vector(rng, 7);
  const QuadraticModel d = from_kkt_solution(sys.solve(r), set);
  for (Eigen::Index j = 0; j < 7; ++j) EXPECT_NEAR(d.eval(pts.col(j)), r[j], 1e-8);
}

TEST(LagrangePolynomial, CardinalityAndPartitionOfUnity) {
  std::mt19937_64 rng(31);
  const InterpolationSet set = random_set(rng, 3, 8);
  const KktSystem sys = KktSystem::assemble(set);
  std::vector<QuadraticModel> l;
  for (Eigen::Index j = 0; j < 8; ++j) l.push_back(lagrange_polynomial(sys, set, j));
  for (Eigen::Index j = 0; j < 8; ++j) {
    for (Eigen::Index i = 0; i < 8; ++i) {
      EXPECT_NEAR(l[j].eval(set.point(i)), i == j ? 1.0 : 0.0, 1e-10);
    }
  }
  for (int s = 0; s < 20; ++s) {
    const Point x = oracle::random_vector(rng, 3);
    double sum = 0.0;
    for (const QuadraticModel& q : l) sum += q.eval(x);
    EXPECT_NEAR(sum, 1.0, 1e-9);
    const Vector direct = lagrange_values(sys, x);
    for (Eigen::Index j = 0; j < 8; ++j) EXPECT_NEAR(direct[j], l[j].eval(x), 1e-9);
  }
}

TEST(LagrangePolynomial, WorkedExampleFirstPoint) {
  const InterpolationSet set = first_set();
  const QuadraticModel l0 = lagrange_polynomial(KktSystem::assemble(set), set, 0);
  EXPECT_NEAR(l0.eval(p2(0, 0)), 1.0, 1e-12);
  for (const Point& x : {p2(1, 0), p2(-1, 0), p2(0, 1), p2(0, -1)}) {
    EXPECT_NEAR(l0.eval(x), 0.0, 1e-12);
  }
}

}  // namespace
}  // namespace dfoto
