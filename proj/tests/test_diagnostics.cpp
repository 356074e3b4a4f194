#include <gtest/gtest.h>

#include <random>

#include "stvar/diagnostics.hpp"
#include "stvar/harness.hpp"

using namespace stvar;

TEST(Acf, MatchesDirectFormula) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n;
  const MatrixXd x = MatrixXd::NullaryExpr(60, 2, [&] { return n(rng); });
  const CorrReport r = acf_ccf(x, 3);
  ASSERT_EQ(r.corr.size(), 4u);
  const Eigen::RowVectorXd mean = x.colwise().mean();
  const MatrixXd c = x.rowwise() - mean;
  const double T = 60.0;
  for (Index k = 0; k <= 3; ++k) {
    for (Index i = 0; i < 2; ++i) {
      for (Index j = 0; j < 2; ++j) {
        double s = 0.0;
        for (Index t = k; t < 60; ++t) s += c(t, i) * c(t - k, j);
        const double ref = (s / T) / std::sqrt(c.col(i).squaredNorm() / T * c.col(j).squaredNorm() / T);
        EXPECT_NEAR(r.corr[k](i, j), ref, 1e-13);
      }
    }
  }
  EXPECT_NEAR(r.band, 1.96 / std::sqrt(60.0), 1e-15);
}

TEST(Acf, ArOneDecay) {
  Rng rng(3);
  VectorXd x(20000);
  x(0) = 0.0;
  for (Index t = 1; t < x.size(); ++t) x(t) = 0.6 * x(t - 1) + standard_normal(rng);
  const CorrReport r = acf_ccf(x, 2);
  EXPECT_NEAR(r.corr[1](0, 0), 0.6, 0.02);
  EXPECT_NEAR(r.corr[2](0, 0), 0.36, 0.02);
}

TEST(Acf, ConstantSeriesFlagged) {
  MatrixXd x(20, 2);
  x.col(0).setConstant(3.0);
  x.col(1).setLinSpaced(20, 0, 1);
  const CorrReport r = acf_ccf(x, 1);
  EXPECT_TRUE(r.constant[0]);
  EXPECT_FALSE(r.constant[1]);
  EXPECT_TRUE(std::isnan(r.corr[0](0, 1)));
  EXPECT_FALSE(std::isnan(r.corr[1](1, 1)));
}

TEST(Qq, OrderStatisticsAgainstQuantiles) {
  VectorXd e(12);
  e << 3, -1, 0.5, 2, -2, 0, 1, -0.5, 4, -3, 1.5, 0.2;
  const SkewTParams p(6.0, 0.1);
  const auto q = qq_data(e, p);
  ASSERT_EQ(q.size(), 12u);
  for (std::size_t k = 0; k < q.size(); ++k) {
    EXPECT_EQ(q[k].k, static_cast<Index>(k + 1));
    EXPECT_DOUBLE_EQ(q[k].theoretical, quantile((k + 0.5) / 12.0, p));
    if (k) EXPECT_LE(q[k - 1].empirical, q[k].empirical);
  }
  EXPECT_EQ(q.front().empirical, -3);
  EXPECT_THROW(qq_data(e.head(5), p), std::invalid_argument);
}

TEST(Diagnostics, StandardizedResidualsAreStructuralShocks) {
  const Model m = lstvar_fixture(1);
  const Simulation sim = simulate(m.spec, m.params, {100, 2, 100, std::nullopt});
  EXPECT_LT((standardized_residuals(m.spec, m.params, sim.data) - sim.shocks).cwiseAbs().maxCoeff(), 1e-9);
}
