#include <gtest/gtest.h>

#include <cmath>

#include "feller/catalog.hpp"
#include "feller/inversion.hpp"
#include "oracles.hpp"

using namespace feller;

namespace {

GridFunction e0(const OperatorFamily& fam) {
  Vector v = Vector::Zero(static_cast<Eigen::Index>(fam.space().size()));
  v[0] = 1.0;
  return GridFunction(fam.space_ptr(), v);
}

OperatorFamily zero_generator(int n) {
  return OperatorFamily(share(StateSpace::finite(static_cast<std::size_t>(n))), Generator(Matrix::Zero(n, n)));
}

InversionConfig config(double lambda, double t) {
  InversionConfig c;
  c.lambda = lambda;
  c.t = t;
  return c;
}

}  // namespace

TEST(Inversion, ZeroGeneratorClosedForm) {
  const auto fam = zero_generator(4);
  const GridFunction f(fam.space_ptr(), std::vector<double>{1.0, -0.5, 0.25, 2.0});
  const auto r = inversion_apply(fam, config(2.0, 0.5), f);
  const double want = 1.0 - std::exp(-std::exp(1.0));  // 0.93401...
  EXPECT_NEAR(want, 0.93401196415468746, 1e-15);
  EXPECT_LT((r.value.values() - want * f.values()).cwiseAbs().maxCoeff() / sup_norm(f), 1e-12);
}

TEST(Inversion, TwoStateSweepMatchesQuadPrecisionOracle) {
  const auto fam = make_two_state(1.0, 1.0);
  const auto sweep = inversion_convergence_sweep(fam, 0.25, e0(fam), {16.0, 1.0, 4.0, 2.0, 8.0});
  ASSERT_EQ(sweep.size(), 5u);
  // Frozen high-precision values of the same errors.
  const double frozen[] = {0.35728145021845694, 0.25061224792500187, 0.10579129579277372,
                           0.029012443374746476, 0.017667419346618727};
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    EXPECT_EQ(sweep[i].lambda, std::ldexp(1.0, static_cast<int>(i)));
    EXPECT_NEAR(sweep[i].sup_error, oracle::two_state_inversion_error(sweep[i].lambda, 0.25), 1e-11);
    EXPECT_NEAR(sweep[i].sup_error, frozen[i], 1e-11);
    if (i) EXPECT_LT(sweep[i].sup_error, sweep[i - 1].sup_error);
  }
  EXPECT_LE(sweep.back().sup_error, 2e-2);
}

TEST(Inversion, TwoStateAtLambdaEight) {
  const auto fam = make_two_state(1.0, 1.0);
  const auto r = inversion_apply(fam, config(8.0, 0.25), e0(fam));
  const double e = std::exp(-0.5);
  EXPECT_NEAR((1 + e) / 2, 0.80327, 1e-5);
  EXPECT_LT(std::max(std::abs(r.value[0] - (1 + e) / 2), std::abs(r.value[1] - (1 - e) / 2)), 5e-2);
}

TEST(Inversion, TimeZeroErrorsLevelOffAwayFromZero) {
  // At t = 0 the coefficients no longer depend on lambda, and the series
  // tends to (1 - e^{-1}) f + O(1/lambda) rather than f.
  const auto fam = make_two_state(1.0, 1.0);
  const auto sweep = inversion_convergence_sweep(fam, 0.0, e0(fam), {4.0, 16.0, 64.0, 256.0});
  const double frozen[] = {0.49446737476522881, 0.41152015524206716, 0.37990508909385055,
                           0.37096418375464203};
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    EXPECT_NEAR(sweep[i].sup_error, frozen[i], 1e-13);
    EXPECT_NEAR(sweep[i].sup_error, oracle::two_state_inversion_error(sweep[i].lambda, 0.0), 1e-13);
    if (i) EXPECT_LT(sweep[i].sup_error, sweep[i - 1].sup_error);
  }
  EXPECT_GT(sweep.back().sup_error, std::exp(-1.0));
}

TEST(Inversion, LambdaTimesTCapIsEnforced) {
  const auto fam = make_two_state(1.0, 1.0);
  EXPECT_THROW(inversion_apply(fam, config(20.0, 0.25), e0(fam)), std::invalid_argument);
  auto c = config(20.0, 0.25);
  c.allow_over_cap = true;
  c.max_terms = 600;
  EXPECT_THROW(inversion_apply(fam, c, e0(fam)), CancellationError);  // peak ~ 5e27
}

TEST(Inversion, DoublePrecisionBackingsGuardAtOneE12) {
  const auto fam = make_heat_kernel(2.0, 0.1);
  const auto f = GridFunction::constant(fam.space_ptr(), 0.5);
  EXPECT_THROW(inversion_apply(fam, config(14.0, 0.25), f), CancellationError);  // peak ~ 1.7e13 * 0.5
  EXPECT_NO_THROW(inversion_apply(fam, config(4.0, 0.25), f));
}

TEST(Inversion, PeakBoundFollowsTheTermMaximum) {
  EXPECT_NEAR(series_peak_bound(0.0, 400), 1.0, 1e-15);
  EXPECT_NEAR(series_peak_bound(4.0, 400) / 2.78e22, 1.0, 0.01);
  EXPECT_NEAR(series_peak_bound(3.0, 400) / 4.7e7, 1.0, 0.02);
  EXPECT_EQ(cancellation_limit(true), 1e24);
  EXPECT_EQ(cancellation_limit(false), 1e12);
}

TEST(Inversion, TailBoundAccountsForTruncation) {
  const auto fam = make_two_state(1.0, 1.0);
  for (double lambda : {1.0, 4.0, 8.0}) {
    for (int n : {5, 10, 20}) {
      auto c = config(lambda, 0.25);
      c.max_terms = n;
      c.term_tol = 1e-300;
      const auto a = inversion_apply(fam, c, e0(fam));
      c.max_terms = 2 * n;
      const auto b = inversion_apply(fam, c, e0(fam));
      EXPECT_EQ(a.terms_used, n);
      EXPECT_LE(std::abs(sup_norm(a.value) - sup_norm(b.value)), a.tail_bound * (1 + 1e-12) + 1e-15)
          << "lambda " << lambda << " N " << n;
    }
  }
}

TEST(Inversion, StopsOnlyPastThePeak) {
  const auto fam = make_two_state(1.0, 1.0);
  const auto r = inversion_apply(fam, config(16.0, 0.25), e0(fam));
  EXPECT_GE(r.terms_used, static_cast<int>(std::exp(4.0)));
  EXPECT_LT(r.tail_bound, 1e-12);
}

TEST(Inversion, PlainAndCompensatedAgreeWhenCancellationIsMild) {
  const auto fam = make_birth_death(10, 1.0, 2.0);
  oracle::Gen gen(9);
  const GridFunction f(fam.space_ptr(), gen.vector(10));
  auto c = config(4.0, 0.5);
  const auto comp = inversion_apply(fam, c, f);
  c.summation = Summation::plain;
  const auto plain = inversion_apply(fam, c, f);
  EXPECT_LT((comp.value.values() - plain.value.values()).cwiseAbs().maxCoeff(), 1e-20 + 1e-14);
}

TEST(Inversion, BatchedEqualsSingle) {
  const auto fam = make_birth_death(8, 1.0, 1.0);
  oracle::Gen gen(4);
  std::vector<GridFunction> fs;
  for (int k = 0; k < 3; ++k) fs.emplace_back(fam.space_ptr(), gen.vector(8));
  const auto batch = inversion_apply(fam, config(8.0, 0.25), fs);
  for (std::size_t k = 0; k < fs.size(); ++k) {
    const auto one = inversion_apply(fam, config(8.0, 0.25), fs[k]);
    EXPECT_LT((batch[k].value.values() - one.value.values()).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(Inversion, RejectsBadConfigs) {
  const auto fam = make_two_state(1.0, 1.0);
  EXPECT_THROW(inversion_apply(fam, config(0.0, 0.25), e0(fam)), std::invalid_argument);
  EXPECT_THROW(inversion_apply(fam, config(1.0, -0.25), e0(fam)), std::invalid_argument);
  auto c = config(1.0, 0.25);
  c.term_tol = 0.0;
  EXPECT_THROW(inversion_apply(fam, c, e0(fam)), std::invalid_argument);
  EXPECT_EQ(parse_summation("plain"), Summation::plain);
  EXPECT_THROW(parse_summation("kahan"), std::invalid_argument);
}
