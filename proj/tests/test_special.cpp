#include <gtest/gtest.h>

#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <limits>
#include <vector>

#include "spherecover/capgeom.hpp"
#include "spherecover/special.hpp"

using namespace spherecover;

TEST(LogIbeta, MatchesBoostAcrossParameterGrid) {
  for (double a : {0.5, 1.0, 1.5, 2.5, 5.0, 50.0, 500.0}) {
    for (double x : {1e-6, 0.01, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99, 0.999999}) {
      const double ref = boost::math::ibeta(a, 0.5, x);
      if (ref < 1e-300) continue;
      const double got = ibeta(a, 0.5, x, 1.0 - x);
      EXPECT_NEAR(got, ref, 1e-12 * ref) << "a=" << a << " x=" << x;
    }
  }
}

TEST(LogIbeta, EdgeValues) {
  EXPECT_EQ(log_ibeta(3.0, 0.5, 0.0, 1.0), -std::numeric_limits<double>::infinity());
  EXPECT_EQ(log_ibeta(3.0, 0.5, 1.0, 0.0), 0.0);
  EXPECT_THROW(log_ibeta(3.0, 0.5, 0.5, 0.6), std::invalid_argument);
}

TEST(LogIbeta, ComplementFormKeepsPrecisionNearOne) {
  // I_x(a, 1/2) for x -> 1 with y given exactly.
  const double y = 1e-14;
  const double got = ibeta(2.0, 0.5, 1.0 - y, y);
  const double ref = boost::math::ibetac(0.5, 2.0, y);  // I_{1-y}(2, 1/2) = 1 - I_y(1/2, 2)
  EXPECT_NEAR(got, ref, 1e-12);
}

TEST(LogSumExp, BasicIdentities) {
  const std::vector<double> v = {std::log(1.0), std::log(2.0), std::log(3.0)};
  EXPECT_NEAR(log_sum_exp(v), std::log(6.0), 1e-15);
  EXPECT_EQ(log_sum_exp(std::vector<double>{}), -std::numeric_limits<double>::infinity());
  const std::vector<double> huge = {-1000.0, -1000.0};
  EXPECT_NEAR(log_sum_exp(huge), -1000.0 + std::log(2.0), 1e-12);
  EXPECT_NEAR(log_add_exp(std::log(0.25), std::log(0.75)), 0.0, 1e-15);
}

// Reference values from tests/oracles/frozen_values.py (mpmath, 50 digits).
TEST(CapFractionFrozen, ModerateCaps) {
  EXPECT_NEAR(cap_fraction(SphereSpec(2, 2.0), 1.0).theta, 0.066987298107780677, 1e-15);
  EXPECT_NEAR(cap_fraction(SphereSpec(2, 1.0), 0.5).theta, 0.066987298107780677, 1e-15);
  EXPECT_NEAR(cap_fraction(SphereSpec(3, 2.0), 1.0).theta, 0.028834442811218654, 1e-15);
  EXPECT_NEAR(cap_fraction(SphereSpec(5, 1.5), 1.0).theta, 0.027245049671188121, 1e-15);
  EXPECT_NEAR(cap_fraction(SphereSpec(3, 1.5), 0.9).theta, 0.052044019330913929, 1e-15);
  EXPECT_NEAR(cap_fraction(SphereSpec(3, 1.5), 0.71).theta, 0.024229606614338075, 1e-15);
}

TEST(CapFractionFrozen, LogScaleBeyondUnderflow) {
  const CapMeasure m = cap_fraction(SphereSpec(2000, 1.5), 0.5);
  EXPECT_TRUE(m.underflow);
  EXPECT_EQ(m.theta, 0.0);
  EXPECT_NEAR(m.log_theta, -2201.8852630091927, 1e-12 * 2201.9);
  const CapMeasure m2 = cap_fraction(SphereSpec(100, 1.5), 0.9978);
  EXPECT_FALSE(m2.underflow);
  EXPECT_NEAR(m2.log_theta, -43.706276998550825, 1e-12 * 43.7);
}

TEST(CapFractionFrozen, ByAngle) {
  EXPECT_NEAR(cap_fraction_for_angle(9, M_PI / 4).theta, 0.0074781819552071074, 1e-15);
  EXPECT_NEAR(cap_fraction_for_angle(2, M_PI / 3).theta, 0.25, 1e-15);
  EXPECT_NEAR(cap_fraction_for_angle(49, M_PI / 3).theta, 9.3531594056697364e-5, 1e-17);
  EXPECT_NEAR(cap_fraction_for_angle(7, M_PI / 2).theta, 0.5, 1e-15);
}
