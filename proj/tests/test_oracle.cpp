#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "qshape/oracle.hpp"

using namespace qshape;

TEST(OracleConvex, QuarterSquare) {
  const OracleConvex r = oracle_convex(Poly({0.0, 0.0, 0.25}), Grid::uniform(16));
  EXPECT_DOUBLE_EQ(r.min_d2, 0.5);
  EXPECT_EQ(r.outcome, Outcome::kConvexOnGrid);
  EXPECT_FALSE(r.witness);
}

TEST(OracleConvex, CubicWitness) {
  const Grid g = Grid::univariate({-0.4, -0.1, 0.2, 0.4});
  const OracleConvex r = oracle_convex(Poly({0.0, 0.0, 0.0, 1.0}), g);
  EXPECT_NEAR(r.min_d2, -2.4, 1e-15);
  EXPECT_EQ(r.argmin_d2, 0u);
  ASSERT_TRUE(r.witness);
  EXPECT_EQ(r.outcome, Outcome::kNotConvex);
  EXPECT_DOUBLE_EQ(r.witness->point[0], -0.4);
}

TEST(OracleConvex, JensenPairForSquare) {
  const Grid g = Grid::univariate({-0.4, 0.4});
  const OracleConvex r = oracle_convex(Poly({0.0, 0.0, 1.0}), g, WeightVector({0.5, 0.5}), ConvexCriterion::kJensen);
  EXPECT_NEAR(*r.lhs, 0.0, 1e-15);
  EXPECT_NEAR(*r.rhs, 0.16, 1e-15);
  EXPECT_EQ(r.outcome, Outcome::kConvexOnGrid);
  const OracleConvex neg =
      oracle_convex(Poly({0.0, 0.0, -1.0}), g, WeightVector({0.5, 0.5}), ConvexCriterion::kJensen);
  EXPECT_EQ(neg.outcome, Outcome::kNotConvex);
}

TEST(OracleConvex, FirstDerivativeDifferences) {
  const Grid g = Grid::uniform(8);
  const OracleConvex r = oracle_convex(Poly({0.0, 0.0, -1.0}), g, std::nullopt, ConvexCriterion::kFirstDerivative);
  EXPECT_EQ(r.outcome, Outcome::kNotConvex);
  ASSERT_TRUE(r.witness);
  EXPECT_EQ(r.witness->kind, Witness::Kind::kAdjacentPair);
  EXPECT_NEAR(r.min_d1_diff, -2.0 / 7.0, 1e-14);
}

TEST(OracleConvex, MultivariateJensen) {
  const MultiPoly f(2, {{0.5, {1, 1}}});
  const Grid g = Grid::multivariate(2, {{0.4, 0.4}, {-0.4, -0.4}});
  const OracleConvex r = oracle_convex(f, g, WeightVector({0.5, 0.5}));
  EXPECT_NEAR(*r.lhs, 0.0, 1e-15);
  EXPECT_NEAR(*r.rhs, 0.08, 1e-15);
  EXPECT_EQ(r.outcome, Outcome::kConvexOnGrid);
}

TEST(OracleConvex, IgnoresPaddedPoints) {
  // Padding repeats the last point; three points pad to four.
  const Grid g = Grid::univariate({-0.4, 0.0, 0.4});
  ASSERT_EQ(g.size(), 4u);
  const OracleConvex r = oracle_convex(Poly({0.0, 0.0, 1.0}), g, WeightVector({0.25, 0.5, 0.25}),
                                       ConvexCriterion::kJensen);
  EXPECT_NEAR(*r.rhs, 0.08, 1e-15);
}

TEST(OracleMonotone, Examples) {
  const Grid g = Grid::uniform(8);
  EXPECT_EQ(oracle_monotone(Poly({0.0, 0.5}), g, Direction::kIncreasing).outcome, Outcome::kMonotoneIncreasing);
  EXPECT_EQ(oracle_monotone(Poly({0.0, -0.5}), g, Direction::kDecreasing).outcome, Outcome::kMonotoneDecreasing);
  const OracleMonotone sq = oracle_monotone(Poly({0.0, 0.0, 1.0}), g, Direction::kIncreasing);
  EXPECT_EQ(sq.outcome, Outcome::kNotMonotone);
  ASSERT_TRUE(sq.witness);
  EXPECT_DOUBLE_EQ(sq.witness->point[0], -0.5);
}

// The oracle's exact derivatives agree with central differences.
TEST(OracleSelfTest, DerivativesMatchFiniteDifferences) {
  std::mt19937_64 rng(123);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<std::size_t> deg(1, 8);
  const double h = 1e-6;
  for (int t = 0; t < 100000; ++t) {
    std::vector<double> c(deg(rng) + 1);
    for (double& x : c) x = u(rng);
    const Poly f(c);
    const double x = 0.5 * u(rng);
    const Poly d1 = derivative(f, 1);
    const Poly d2 = derivative(f, 2);
    const double fd1 = (f(x + h) - f(x - h)) / (2 * h);
    const double fd2 = (d1(x + h) - d1(x - h)) / (2 * h);
    ASSERT_LE(std::abs(d1(x) - fd1), 1e-4 * std::abs(d1(x)) + 1e-8) << t;
    ASSERT_LE(std::abs(d2(x) - fd2), 1e-4 * std::abs(d2(x)) + 1e-8) << t;
  }
}
