#include <gtest/gtest.h>

#include <cmath>

#include "feller/catalog.hpp"
#include "feller/operators.hpp"
#include "oracles.hpp"

using namespace feller;

namespace {

OperatorFamily zero_generator(std::size_t n) {
  return OperatorFamily(share(StateSpace::finite(n)), Generator(Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n))));
}

GridFunction fn(const OperatorFamily& fam, std::vector<double> v) {
  return GridFunction(fam.space_ptr(), v);
}

}  // namespace

TEST(Generator, RejectsInvalidRateMatrices) {
  Matrix q(2, 2);
  q << -1.0, 1.0, -0.5, 0.5;  // negative off-diagonal
  EXPECT_THROW(Generator{q}, std::invalid_argument);
  q << -1.0, 2.0, 1.0, -1.0;  // positive row sum
  EXPECT_THROW(Generator{q}, std::invalid_argument);
  EXPECT_THROW(Generator(Matrix::Zero(2, 3)), std::invalid_argument);
  q << -1.0, 1.0, 1.0, -2.0;  // killing is fine
  const Generator g(q);
  EXPECT_FALSE(g.conservative());
  q << -1.0, 1.0, 1.0, -1.0;
  EXPECT_TRUE(Generator(q).conservative());
}

TEST(Semigroup, TimeZeroIsTheIdentityBitForBit) {
  const auto fam = make_two_state(1.0, 1.0);
  const auto f = fn(fam, {0.123456789, -7.0});
  const auto u = semigroup_apply(fam, 0.0, f);
  EXPECT_EQ(u.values(), f.values());
  EXPECT_THROW(semigroup_apply(fam, -1.0, f), std::invalid_argument);
}

TEST(Semigroup, TwoStateClosedForm) {
  const auto fam = make_two_state(1.0, 1.0);
  for (double t : {0.01, 0.5, 2.0}) {
    const auto u = semigroup_apply(fam, t, fn(fam, {1.0, 0.0}));
    EXPECT_NEAR(u[0], (1.0 + std::exp(-2.0 * t)) / 2.0, 1e-15);
    EXPECT_NEAR(u[1], (1.0 - std::exp(-2.0 * t)) / 2.0, 1e-15);
  }
  // Long-time limit: every row tends to the stationary mean.
  const auto u = semigroup_apply(fam, 40.0, fn(fam, {3.0, -1.0}));
  EXPECT_NEAR(u[0], 1.0, 1e-12);
  EXPECT_NEAR(u[1], 1.0, 1e-12);
}

TEST(Semigroup, TwoStateAtLogTwoOverTwo) {
  const auto fam = make_two_state(1.0, 1.0);
  const auto u = semigroup_apply(fam, std::log(2.0) / 2.0, fn(fam, {1.0, 0.0}));
  EXPECT_NEAR(u[0], 0.75, 1e-15);
  EXPECT_NEAR(u[1], 0.25, 1e-15);
}

TEST(Resolvent, TwoStateQuadratureWithFourHundredNodes) {
  const auto fam = make_two_state(1.0, 1.0);
  const auto f = fn(fam, {1.0, 0.0});
  const auto quad = resolvent_apply_quadrature(fam, 1.0, f, 40.0, 400);
  const auto exact = resolvent_apply_exact(fam, 1.0, f);
  EXPECT_LT((quad.value.values() - exact.values()).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Resolvent, TwoStateSymbolicInverse) {
  const auto fam = make_two_state(2.0, 1.0);
  for (double l : {0.5, 1.0, 8.0}) {
    const Matrix r = fam.resolvent_exact(l, Matrix::Identity(2, 2));
    EXPECT_LT((r - oracle::two_state_r(2.0, 1.0, l)).cwiseAbs().maxCoeff(), 1e-15);
  }
  EXPECT_THROW(fam.resolvent_exact(0.0, Matrix::Identity(2, 2)), std::invalid_argument);
}

TEST(Resolvent, ZeroGeneratorQuadratureGivesHalfAtLambdaTwo) {
  const auto fam = zero_generator(3);
  const auto q = resolvent_apply_quadrature(fam, 2.0, GridFunction::constant(fam.space_ptr(), 1.0), 20.0, 64);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_NEAR(q.value[i], 0.5, 1e-11);
    EXPECT_LE(std::abs(q.value[i] - 0.5), q.error_estimate);
  }
}

TEST(Resolvent, QuadratureAgreesWithExactSolveWithinItsEstimate) {
  const auto fam = make_birth_death(20, 1.0, 1.5);
  oracle::Gen gen(3);
  const auto f = GridFunction(fam.space_ptr(), gen.vector(20));
  for (double l : {0.5, 2.0, 8.0}) {
    const auto exact = resolvent_apply_exact(fam, l, f);
    const auto quad = resolvent_apply_quadrature(fam, l, f, 40.0 / l, 64);
    const double err = (exact.values() - quad.value.values()).cwiseAbs().maxCoeff();
    EXPECT_LE(err, quad.error_estimate) << "lambda " << l;
    const auto fine = resolvent_apply_quadrature(fam, l, f, 40.0 / l, 512);
    EXPECT_LT((exact.values() - fine.value.values()).cwiseAbs().maxCoeff(), 1e-8) << "lambda " << l;
  }
}

TEST(Resolvent, QuadratureRejectsBadSettings) {
  const auto fam = make_two_state(1.0, 1.0);
  const auto f = fn(fam, {1.0, 0.0});
  EXPECT_THROW(resolvent_apply_quadrature(fam, 1.0, f, 0.0, 64), std::invalid_argument);
  EXPECT_THROW(resolvent_apply_quadrature(fam, 1.0, f, 10.0, 4), std::invalid_argument);
}

TEST(Residuals, EqualParametersGiveExactlyZero) {
  const auto fam = make_birth_death(10, 1.0, 1.0);
  oracle::Gen gen(5);
  const GridFunction f(fam.space_ptr(), gen.vector(10));
  EXPECT_EQ(resolvent_identity_residual(fam, 2.0, 2.0, f), 0.0);
  EXPECT_LT(resolvent_identity_residual(fam, 0.5, 8.0, f), 1e-13);
  EXPECT_LT(semigroup_law_residual(fam, 0.3, 0.7, f), 1e-13);
  EXPECT_LT(commutation_residual(fam, 0.3, 2.0, f), 1e-13);
}

TEST(Resolvent, KilledChainConstants) {
  const double c = 0.5;
  const auto fam = make_killed_chain(30, c);
  const auto one = GridFunction::constant(fam.space_ptr(), 1.0);
  const auto u = semigroup_apply(fam, 1.3, one);
  const auto r = resolvent_apply_exact(fam, 2.0, one);
  for (std::size_t i = 0; i < 30; ++i) {
    EXPECT_NEAR(u[i], std::exp(-c * 1.3), 1e-13);
    EXPECT_NEAR(r[i], 1.0 / (2.0 + c), 1e-14);
  }
}

TEST(OperatorFamily, ColumnsMustMatchTheSpace) {
  const auto fam = make_two_state(1.0, 1.0);
  EXPECT_THROW(fam.semigroup(1.0, Matrix::Zero(3, 1)), std::invalid_argument);
  const GridFunction other(share(StateSpace::finite(2)), std::vector<double>{1, 2});
  // Same shape on a different object is the same space.
  EXPECT_NO_THROW(semigroup_apply(fam, 1.0, other));
  const GridFunction wrong(share(StateSpace::finite(3)), std::vector<double>{1, 2, 3});
  EXPECT_THROW(semigroup_apply(fam, 1.0, wrong), std::invalid_argument);
}

TEST(OperatorFamily, MixingGuessIsSlowestHoldingTime) {
  EXPECT_DOUBLE_EQ(make_two_state(2.0, 0.5).mixing_time_guess(), 2.0);
  EXPECT_EQ(make_heat_kernel(1.0, 0.1).mixing_time_guess(), 0.0);
}
