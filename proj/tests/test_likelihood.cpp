#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "stvar/estimate.hpp"
#include "stvar/harness.hpp"
#include "stvar/likelihood.hpp"

using namespace stvar;

namespace {

oracle::LogisticModel to_oracle(const Params& p) {
  oracle::LogisticModel o;
  o.phi = p.phi;
  o.a = {p.ar[0][0], p.ar[1][0]};
  o.b = p.impact;
  o.c = p.weights.location;
  o.gamma = p.weights.scale;
  o.nu = p.nu;
  o.lambda = p.lambda;
  return o;
}

Params perturbed(const Params& base, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> n(0.0, scale);
  Params p = base;
  for (auto& b : p.impact) b += MatrixXd::NullaryExpr(b.rows(), b.cols(), [&] { return n(rng); });
  for (auto& a : p.ar) a[0] += MatrixXd::NullaryExpr(2, 2, [&] { return n(rng); });
  p.nu = p.nu.array() + 0.5 * VectorXd::NullaryExpr(2, [&] { return std::abs(n(rng)); }).array();
  p.lambda = p.lambda.unaryExpr([&](double l) { return std::clamp(l + n(rng), -0.9, 0.9); });
  return p;
}

}  // namespace

TEST(Likelihood, MatchesLoopOracle) {
  const Model m = lstvar_fixture(1);
  const Simulation sim = simulate(m.spec, m.params, {500, 2, 200, std::nullopt});
  std::mt19937_64 rng(3);
  for (int k = 0; k < 5; ++k) {
    const Params p = k == 0 ? m.params : perturbed(m.params, rng, 0.1);
    const double ref = oracle::logistic_loglik(to_oracle(p), sim.data.stacked());
    const LoglikValue ll = loglik(m.spec, p, sim.data);
    ASSERT_TRUE(ll.ok());
    EXPECT_NEAR(ll.value, ref, 1e-9 * std::abs(ref));
  }
}

TEST(Likelihood, GeneralKernelAgreesWithSmallKernel) {
  // d = 5 goes through the dynamic-size path; compare against a block-diagonal
  // embedding whose log-likelihood separates.
  const Index d = 5;
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n(0.0, 1.0);
  const Index T = 40;
  MatrixXd u = MatrixXd::NullaryExpr(T, d, [&] { return n(rng); });
  MatrixXd w(T, 2);
  for (Index t = 0; t < T; ++t) {
    const double a = std::uniform_real_distribution<double>(0, 1)(rng);
    w.row(t) << 1 - a, a;
  }
  std::vector<MatrixXd> b(2, MatrixXd::Identity(d, d));
  b[0].topLeftCorner(2, 2) << 0.6, 0.2, -0.3, 0.4;
  b[1].topLeftCorner(2, 2) << 0.7, 0.3, 0.1, 0.8;
  b[1].bottomRightCorner(3, 3) *= 2.0;
  VectorXd nu = VectorXd::Constant(d, 6.0), lambda = VectorXd::Constant(d, 0.1);
  const LoglikValue full = structural_loglik(u, w, b, nu, lambda);
  std::vector<MatrixXd> b2{b[0].topLeftCorner(2, 2), b[1].topLeftCorner(2, 2)};
  std::vector<MatrixXd> b3{b[0].bottomRightCorner(3, 3), b[1].bottomRightCorner(3, 3)};
  const LoglikValue top = structural_loglik(u.leftCols(2), w, b2, nu.head(2), lambda.head(2));
  const LoglikValue bottom = structural_loglik(u.rightCols(3), w, b3, nu.tail(3), lambda.tail(3));
  EXPECT_NEAR(full.value, top.value + bottom.value, 1e-9);
}

TEST(Likelihood, SingularPeriodReported) {
  const Model m = lstvar_fixture(1);
  MatrixXd u = MatrixXd::Ones(3, 2);
  MatrixXd w(3, 2);
  w << 1, 0, 0.5, 0.5, 0, 1;
  const std::vector<MatrixXd> b{m.params.impact[0], -m.params.impact[0]};
  const LoglikValue ll = structural_loglik(u, w, b, m.params.nu, m.params.lambda);
  EXPECT_FALSE(ll.ok());
  EXPECT_EQ(ll.singular_period, 1);
  EXPECT_EQ(ll.value, kRejected);
}

TEST(Likelihood, InvalidParametersRejectedWithoutThrowing) {
  const Model m = lstvar_fixture(1);
  const Simulation sim = simulate(m.spec, m.params, {50, 2, 100, std::nullopt});
  const Objective obj(m.spec, sim.data);
  Params p = m.params;
  p.nu(1) = 1.0;
  EXPECT_EQ(obj.loglik(p).value, kRejected);
  EXPECT_EQ(obj.pen_loglik(p), kRejected);
}

TEST(Penalty, HandCase) {
  // two moduli at 0.97 with eta = 0.05: excess 0.02 each
  const std::vector<VectorXd> moduli{(VectorXd(2) << 0.97, 0.97).finished()};
  const double pen = 0.2 * 500 * 2 * stability_excess(moduli, 0.05);
  EXPECT_NEAR(pen, 0.16, 1e-12);
  EXPECT_NEAR(pnls_objective(10.0, 3.0, moduli, {}), 10.0 + 0.2 * 3.0 * 8e-4, 1e-15);
}

TEST(Penalty, ZeroWhenStable) {
  const Model m = lstvar_fixture(1);
  EXPECT_EQ(penalty(m.spec, m.params, 1000, {}), 0.0);
  const Model m2 = lstvar_fixture(2);
  // second fixture: complex pair of modulus sqrt(0.94) in regime 1, real 0.98 and 0.49 in regime 2
  const double expected = 0.2 * 1000 * 2 * (2 * std::pow(std::sqrt(0.94) - 0.95, 2) + std::pow(0.98 - 0.95, 2));
  EXPECT_NEAR(penalty(m2.spec, m2.params, 1000, {}), expected, 1e-9);
}

TEST(Penalty, ConfigValidated) {
  EXPECT_THROW((PenaltyConfig{1.5, 0.2}.validate()), std::invalid_argument);
  EXPECT_THROW((PenaltyConfig{0.05, 0.0}.validate()), std::invalid_argument);
}

TEST(Likelihood, ColumnPermutationInvariance) {
  const Model m = lstvar_fixture(1);
  const Simulation sim = simulate(m.spec, m.params, {300, 6, 200, std::nullopt});
  const Objective obj(m.spec, sim.data);
  const double base = obj.loglik(m.params).value;
  const Params q = transform_columns(m.params, {1, 0}, (VectorXd(2) << -1, 1).finished());
  EXPECT_NEAR(obj.loglik(q).value, base, 1e-9);
  EXPECT_EQ(q.nu(0), 12.0);
  EXPECT_EQ(q.lambda(0), -0.2);
}

TEST(ParamCoder, RoundTrip) {
  const Model m = lstvar_fixture(2);
  const ParamCoder coder(m.spec, {});
  EXPECT_EQ(coder.size(), 2 * (2 + 4) + 8 + 2 + 4);
  const VectorXd x = coder.encode(m.params);
  const Params p = coder.decode(x, default_params(m.spec));
  EXPECT_LT((coder.encode(p) - x).norm(), 1e-12);
  EXPECT_NEAR(p.nu(1), 12.0, 1e-12);
  EXPECT_NEAR(p.weights.scale, 5.0, 1e-12);
  EXPECT_EQ(p.impact[1], m.params.impact[1]);
}

TEST(Likelihood, GradientFiniteAtTruth) {
  const Model m = lstvar_fixture(1);
  const Simulation sim = simulate(m.spec, m.params, {200, 6, 200, std::nullopt});
  const Objective obj(m.spec, sim.data);
  const GradientResult g = loglik_gradient(obj, ParamCoder(m.spec, {}), m.params);
  EXPECT_TRUE(g.ok());
  EXPECT_TRUE(g.gradient.allFinite());
}
