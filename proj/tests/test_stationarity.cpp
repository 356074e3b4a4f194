#include <gtest/gtest.h>

#include <random>

#include "stvar/harness.hpp"
#include "stvar/stationarity.hpp"

using namespace stvar;

namespace {

MatrixXd m2(double a, double b, double c, double d) { return (MatrixXd(2, 2) << a, b, c, d).finished(); }

// 2x2 eigenvalue moduli by the quadratic formula
std::pair<double, double> moduli2(const MatrixXd& a) {
  const double tr = a.trace(), det = a.determinant(), disc = tr * tr - 4 * det;
  if (disc < 0) return {std::sqrt(det), std::sqrt(det)};
  const double r1 = std::abs((tr + std::sqrt(disc)) / 2), r2 = std::abs((tr - std::sqrt(disc)) / 2);
  return {std::max(r1, r2), std::min(r1, r2)};
}

}  // namespace

TEST(Stability, FixtureModuli) {
  const double table[4] = {0.58, 0.74, 0.97, 0.98};
  int k = 0;
  for (int v = 1; v <= 2; ++v) {
    const StabilityReport r = stability_check(lstvar_fixture(v).params);
    for (int m = 0; m < 2; ++m, ++k) {
      const auto [hi, lo] = moduli2(lstvar_fixture(v).params.ar[m][0]);
      EXPECT_NEAR(r.max_modulus[m], hi, 1e-12);
      EXPECT_NEAR(r.moduli[m].minCoeff(), lo, 1e-12);
      EXPECT_NEAR(r.max_modulus[m], table[k], 5e-3);
    }
    EXPECT_TRUE(r.stable);
  }
}

TEST(Stability, CompanionLayout) {
  Params p;
  p.phi = {VectorXd::Zero(2)};
  p.ar = {{m2(1, 2, 3, 4), m2(5, 6, 7, 8)}};
  const MatrixXd c = companion(p, 0);
  ASSERT_EQ(c.rows(), 4);
  EXPECT_EQ(c.topLeftCorner(2, 2), m2(1, 2, 3, 4));
  EXPECT_EQ(c.topRightCorner(2, 2), m2(5, 6, 7, 8));
  EXPECT_EQ(c.bottomLeftCorner(2, 2), MatrixXd::Identity(2, 2));
  EXPECT_EQ(c.bottomRightCorner(2, 2), MatrixXd::Zero(2, 2));
}

TEST(Jsr, SingleMatrixBracketsSpectralRadius) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n;
  for (int k = 0; k < 10; ++k) {
    const MatrixXd a = MatrixXd::NullaryExpr(3, 3, [&] { return n(rng); }) * 0.4;
    const double rho = spectral_radius(a);
    const JsrBound b = jsr_bounds({a});
    EXPECT_LE(b.lower, rho + 1e-12);
    EXPECT_GE(b.upper, rho - 1e-12);
    EXPECT_LE(b.upper - b.lower, 5e-3);
  }
}

TEST(Jsr, DiagonalPair) {
  const JsrBound b = jsr_bounds({m2(0.6, 0, 0, 0.1), m2(0.2, 0, 0, 0.5)});
  EXPECT_NEAR(b.lower, 0.6, 1e-3);
  EXPECT_NEAR(b.upper, 0.6, 1e-3);
  EXPECT_TRUE(b.converged);
}

TEST(Jsr, KnownNonCommutingPair) {
  // {[[1,1],[0,1]], [[1,0],[1,1]]} has JSR equal to the golden ratio
  const JsrBound b = jsr_bounds({m2(1, 1, 0, 1), m2(1, 0, 1, 1)}, {1e-2, 30, 200000, true});
  const double phi = (1 + std::sqrt(5.0)) / 2;
  EXPECT_LE(b.lower, phi + 1e-9);
  EXPECT_GE(b.upper, phi - 1e-9);
  EXPECT_NEAR(b.lower, phi, 1e-9);
}

TEST(Jsr, BoundsOrderedOnRandomPairs) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n;
  for (int k = 0; k < 40; ++k) {
    const MatrixXd a = MatrixXd::NullaryExpr(2, 2, [&] { return n(rng); });
    const MatrixXd b = MatrixXd::NullaryExpr(2, 2, [&] { return n(rng); });
    const JsrBound j = jsr_bounds({a, b}, {5e-3, 12, 20000, true});
    EXPECT_LE(j.lower, j.upper);
    EXPECT_GE(j.lower, std::max(spectral_radius(a), spectral_radius(b)) - 1e-12);
  }
}

TEST(Jsr, EmptySetRejected) { EXPECT_THROW(jsr_bounds({}), std::invalid_argument); }

TEST(B1B2, NegativeRealEigenvalueFails) {
  EXPECT_TRUE(logistic_b1b2_check(MatrixXd::Identity(2, 2), m2(2, 0, 0, 3)).pass);
  EXPECT_FALSE(logistic_b1b2_check(MatrixXd::Identity(2, 2), m2(-2, 0, 0, 3)).pass);
  // complex pair is fine
  EXPECT_TRUE(logistic_b1b2_check(MatrixXd::Identity(2, 2), m2(0, -1, 1, 0)).pass);
}

TEST(Ergodic, FixtureReport) {
  const Model m = lstvar_fixture(1);
  const ErgodicReport r = ergodic_report(m.spec, m.params);
  ASSERT_TRUE(r.jsr.has_value());
  ASSERT_TRUE(r.b1b2.has_value());
  EXPECT_LE(r.jsr->lower, r.jsr->upper);
  EXPECT_GE(r.jsr->lower, 0.74 - 5e-3);
  EXPECT_FALSE(r.verdict.empty());
}
