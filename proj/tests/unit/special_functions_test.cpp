#include <gtest/gtest.h>

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <limits>

#include "inferlab/special_functions.hpp"

namespace {

using namespace inferlab;

TEST(NormalCoverage, TableValues) {
  EXPECT_NEAR(normal_coverage(1.0), 0.683, 0.001);
  EXPECT_NEAR(normal_coverage(2.0), 0.955, 0.001);
  EXPECT_NEAR(normal_coverage(3.0), 0.997, 0.001);
}

TEST(NormalCoverage, RejectsNonPositiveK) {
  EXPECT_THROW(normal_coverage(0.0), ParameterError);
  EXPECT_THROW(normal_coverage(-1.0), ParameterError);
  EXPECT_THROW(normal_coverage(std::nan("")), ParameterError);
}

TEST(NormalCdf, SymmetryAndTails) {
  EXPECT_DOUBLE_EQ(normal_cdf(0.0), 0.5);
  for (double x : {0.3, 1.0, 2.5, 6.0}) EXPECT_NEAR(normal_cdf(x) + normal_cdf(-x), 1.0, 1e-15);
  EXPECT_NEAR(normal_cdf(-10.0), 7.6198530241605e-24, 1e-35);
}

TEST(LogAddExp, MatchesDirectEvaluation) {
  EXPECT_NEAR(log_add_exp(std::log(2.0), std::log(3.0)), std::log(5.0), 1e-15);
  EXPECT_DOUBLE_EQ(log_add_exp(1000.0, 1000.0), 1000.0 + std::log(2.0));
  EXPECT_DOUBLE_EQ(log_add_exp(-kInf, 4.0), 4.0);
  EXPECT_DOUBLE_EQ(log_add_exp(4.0, -kInf), 4.0);
  EXPECT_EQ(log_add_exp(-kInf, -kInf), -kInf);
}

TEST(IncompleteBeta, AgreesWithBoost) {
  for (double a : {0.5, 1.0, 2.5, 10.0, 50.0}) {
    for (double b : {0.5, 1.0, 3.0, 20.0}) {
      for (double x : {0.0, 0.01, 0.2, 0.5, 0.77, 0.99, 1.0}) {
        const double expected = boost::math::ibeta(a, b, x);
        EXPECT_NEAR(regularized_incomplete_beta(a, b, x), expected, 1e-12)
            << "a=" << a << " b=" << b << " x=" << x;
      }
    }
  }
}

TEST(StudentCdf, AgreesWithBoost) {
  for (double dof : {1.0, 2.0, 5.0, 30.0, 1000.0}) {
    const boost::math::students_t dist(dof);
    for (double t : {-8.0, -2.0, -0.5, 0.0, 0.7, 1.96, 4.0, 25.0}) {
      EXPECT_NEAR(student_cdf(t, dof), boost::math::cdf(dist, t), 1e-12) << "dof=" << dof << " t=" << t;
    }
  }
}

TEST(StudentCdf, CauchyClosedForm) {
  for (double t : {-3.0, 0.25, 1.0, 10.0}) EXPECT_NEAR(student_cdf(t, 1.0), 0.5 + std::atan(t) / kPi, 1e-13);
}

}  // namespace
