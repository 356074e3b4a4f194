#include <gtest/gtest.h>

#include "stvar/weights.hpp"

using namespace stvar;

namespace {

WeightSpec logistic_spec() {
  WeightSpec s;
  s.kind = WeightKind::logistic;
  s.regimes = 2;
  return s;
}

}  // namespace

TEST(Weights, LogisticValues) {
  const WeightSpec s = logistic_spec();
  const WeightParams p{0.8, 5.0, {}};
  for (double z : {-3.0, 0.0, 0.8, 1.1, 9.0}) {
    const VectorXd a = weights_from_switch(s, p, z);
    const double ref = 1.0 / (1.0 + std::exp(-5.0 * (z - 0.8)));
    EXPECT_NEAR(a(1), ref, 1e-15);
    EXPECT_NEAR(a.sum(), 1.0, 1e-15);
  }
  EXPECT_EQ(logistic_weight(1e6, 0.0, 1.0), 1.0);
  EXPECT_EQ(logistic_weight(-1e6, 0.0, 1.0), 0.0);
}

TEST(Weights, SwitchingVariableFromLags) {
  WeightSpec s = logistic_spec();
  s.switch_var = SwitchVariable{1, 2};
  MatrixXd lags(2, 2);
  lags << 5.0, 6.0, 7.0, 0.25;  // y_{2,t-2} = 0.25
  const VectorXd a = eval_weights(s, WeightParams{0.25, 3.0, {}}, lags, 0);
  EXPECT_DOUBLE_EQ(a(1), 0.5);
}

TEST(Weights, ThresholdIntervalsAreHalfOpen) {
  WeightSpec s;
  s.kind = WeightKind::threshold;
  s.regimes = 3;
  const WeightParams p{0, 1, {-1.0, 2.0}};
  EXPECT_EQ(weights_from_switch(s, p, -1.0)(0), 1.0);
  EXPECT_EQ(weights_from_switch(s, p, -0.999)(1), 1.0);
  EXPECT_EQ(weights_from_switch(s, p, 2.0)(1), 1.0);
  EXPECT_EQ(weights_from_switch(s, p, 2.5)(2), 1.0);
  EXPECT_THROW(validate(s, WeightParams{0, 1, {2.0, -1.0}}), std::invalid_argument);
  EXPECT_THROW(validate(s, WeightParams{0, 1, {2.0}}), std::invalid_argument);
}

TEST(Weights, LogisticApproachesThreshold) {
  const WeightParams lim = logistic_threshold_limit(WeightParams{0.3, 5.0, {}}, 1e7);
  WeightSpec t;
  t.kind = WeightKind::threshold;
  t.regimes = 2;
  const WeightParams steep{0.3, 1e7, {}};
  for (double z : {-1.0, 0.2999, 0.3001, 2.0}) {
    EXPECT_NEAR(weights_from_switch(logistic_spec(), steep, z)(1), weights_from_switch(t, lim, z)(1), 1e-12);
  }
  EXPECT_THROW(logistic_threshold_limit(WeightParams{0.3, 5.0, {}}, 10.0), std::invalid_argument);
}

TEST(Weights, ExogenousChecks) {
  MatrixXd good(3, 2);
  good << 1, 0, 0.5, 0.5, 0.2, 0.8;
  EXPECT_TRUE(validate_exogenous(good).ok());
  MatrixXd collinear(2, 2);
  collinear << 0.5, 0.5, 0.5, 0.5;
  EXPECT_FALSE(validate_exogenous(collinear).linearly_independent);
  MatrixXd bad = good;
  bad(0, 0) = -0.1;
  EXPECT_THROW(normalize_exogenous(bad), std::invalid_argument);
  MatrixXd drift = good;
  drift(1, 0) += 1e-11;
  EXPECT_NEAR(normalize_exogenous(drift).row(1).sum(), 1.0, 1e-15);
  drift(1, 0) += 1e-6;
  EXPECT_THROW(normalize_exogenous(drift), std::invalid_argument);
}

TEST(Weights, KindNames) {
  for (auto k : {WeightKind::logistic, WeightKind::threshold, WeightKind::exogenous}) {
    EXPECT_EQ(weight_kind_from_string(to_string(k)), k);
  }
  EXPECT_THROW(weight_kind_from_string("markov"), std::invalid_argument);
}
