#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "feller/state_space.hpp"

using namespace feller;

TEST(StateSpace, FiniteSpaceHasNoCoordinatesOrBand) {
  const auto s = StateSpace::finite(7);
  EXPECT_EQ(s.size(), 7u);
  EXPECT_FALSE(s.has_coordinates());
  EXPECT_EQ(s.boundary_band(), 0u);
  EXPECT_EQ(s.spacing(), 0.0);
  for (std::size_t i = 0; i < 7; ++i) EXPECT_FALSE(s.in_band(i));
  EXPECT_THROW(StateSpace::finite(0), std::invalid_argument);
}

TEST(StateSpace, UniformGridIsSymmetricWithFivePercentBand) {
  const auto s = StateSpace::uniform_grid(10.0, 0.05);
  EXPECT_EQ(s.size(), 401u);
  EXPECT_EQ(s.boundary_band(), 20u);
  EXPECT_DOUBLE_EQ(s.coordinate(0), -10.0);
  EXPECT_DOUBLE_EQ(s.coordinate(400), 10.0);
  EXPECT_EQ(s.coordinate(200), 0.0);
  EXPECT_EQ(s.origin_index(), 200u);
  EXPECT_TRUE(s.in_band(19));
  EXPECT_FALSE(s.in_band(20));
  EXPECT_FALSE(s.in_band(380));
  EXPECT_TRUE(s.in_band(381));
  EXPECT_DOUBLE_EQ(s.half_width(), 10.0);
}

TEST(StateSpace, GridRejectsNonIntegerCellCount) {
  EXPECT_THROW(StateSpace::uniform_grid(1.0, 0.3), std::invalid_argument);
  EXPECT_THROW(StateSpace::uniform_grid(-1.0, 0.1), std::invalid_argument);
  EXPECT_THROW(StateSpace::uniform_grid(1.0, 0.0), std::invalid_argument);
}

TEST(StateSpace, SmallGridsKeepAtLeastOneBandPoint) {
  const auto s = StateSpace::uniform_grid(1.0, 0.5);  // 5 points
  EXPECT_EQ(s.boundary_band(), 1u);
}

TEST(StateSpace, EqualityComparesShape) {
  EXPECT_EQ(StateSpace::finite(3), StateSpace::finite(3));
  EXPECT_FALSE(StateSpace::finite(3) == StateSpace::finite(4));
  EXPECT_FALSE(StateSpace::uniform_grid(1.0, 0.5) == StateSpace::finite(5));
}

TEST(GridFunction, ValidatesLengthAndFiniteness) {
  auto s = share(StateSpace::finite(3));
  EXPECT_THROW(GridFunction(s, Vector::Zero(4)), std::invalid_argument);
  Vector v(3);
  v << 1.0, std::numeric_limits<double>::quiet_NaN(), 0.0;
  EXPECT_THROW(GridFunction(s, v), std::invalid_argument);
  v[1] = std::numeric_limits<double>::infinity();
  EXPECT_THROW(GridFunction(s, v), std::invalid_argument);
  const GridFunction f(s, std::vector<double>{1.0, -3.0, 2.0});
  EXPECT_EQ(sup_norm(f), 3.0);
  EXPECT_EQ(f[1], -3.0);
}

TEST(C0Verdict, FiniteSpacesAreAlwaysC0) {
  auto s = share(StateSpace::finite(4));
  const GridFunction f(s, std::vector<double>{5.0, -5.0, 5.0, -5.0});
  const auto v = c0_verdict(f, 1e-3, 1e-3);
  EXPECT_TRUE(v.is_c0);
  EXPECT_EQ(v.decay_defect, 0.0);
  EXPECT_EQ(v.continuity_defect, 0.0);
}

TEST(C0Verdict, DecayDefectIsTheBandMaximum) {
  auto s = share(StateSpace::uniform_grid(1.0, 0.1));  // 21 points, band 1
  Vector v = Vector::Zero(21);
  v[0] = 0.25;
  v[10] = 1.0;
  const auto verdict = c0_verdict(GridFunction(s, v), 1e-3, 10.0);
  EXPECT_EQ(verdict.decay_defect, 0.25);
  EXPECT_EQ(verdict.continuity_defect, 1.0);
  EXPECT_FALSE(verdict.is_c0);
}

TEST(C0Verdict, ContinuityDefectIsLargestAdjacentIncrement) {
  auto s = share(StateSpace::uniform_grid(2.0, 0.5));
  const GridFunction f(s, std::vector<double>{0, 0.1, 0.5, 0.2, 0, 0, 0, 0, 0});
  const auto v = c0_verdict(f, 1.0, 0.45);
  EXPECT_DOUBLE_EQ(v.continuity_defect, 0.4);
  EXPECT_TRUE(v.is_c0);
  EXPECT_FALSE(c0_verdict(f, 1.0, 0.3).is_c0);
}

TEST(C0Verdict, RejectsBadTolerancesAndForeignSpaces) {
  auto s = share(StateSpace::finite(2));
  const GridFunction f(s, std::vector<double>{1.0, 2.0});
  EXPECT_THROW(c0_verdict(f, 0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(c0_verdict(f, 1.0, -1.0), std::invalid_argument);
  EXPECT_THROW(c0_verdict(f, StateSpace::finite(3), 1.0, 1.0), std::invalid_argument);
  EXPECT_NO_THROW(c0_verdict(f, StateSpace::finite(2), 1.0, 1.0));
}
