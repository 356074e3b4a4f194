#include <gtest/gtest.h>

#include <sstream>

#include "stvar/harness.hpp"

using namespace stvar;

TEST(Fixtures, FrozenValues) {
  const Model a = lstvar_fixture(1);
  EXPECT_EQ(a.params.ar[0][0], (MatrixXd(2, 2) << 0.7, -0.3, 0.2, 0.4).finished());
  EXPECT_EQ(a.params.ar[1][0], (MatrixXd(2, 2) << 0.5, 0.2, 0.3, 0.5).finished());
  EXPECT_EQ(a.params.phi[1], (VectorXd(2) << 1.2, -1.1).finished());
  const Model b = lstvar_fixture(2);
  EXPECT_EQ(b.params.ar[0][0], (MatrixXd(2, 2) << 1.1, -0.3, 0.2, 0.8).finished());
  EXPECT_EQ(b.params.phi[1], (VectorXd(2) << 0.72, -0.87).finished());
  for (const Model* m : {&a, &b}) {
    // vec(B_1) = (0.6, -0.3, 0.2, 0.4), vec(B_2) = (0.7, 0.1, 0.3, 0.8)
    EXPECT_EQ(vec(m->params.impact[0]), (VectorXd(4) << 0.6, -0.3, 0.2, 0.4).finished());
    EXPECT_EQ(vec(m->params.impact[1]), (VectorXd(4) << 0.7, 0.1, 0.3, 0.8).finished());
    EXPECT_EQ(m->params.weights.location, 0.8);
    EXPECT_EQ(m->params.weights.scale, 5.0);
    EXPECT_EQ(m->params.nu, (VectorXd(2) << 2.5, 12.0).finished());
    EXPECT_EQ(m->params.lambda, (VectorXd(2) << -0.5, 0.2).finished());
  }
  EXPECT_THROW(lstvar_fixture(3), std::invalid_argument);
}

TEST(Flatten, NamesAndOrder) {
  const Model m = lstvar_fixture(1);
  const auto c = flatten_params(m.spec, m.params);
  ASSERT_EQ(c.size(), 26u);
  EXPECT_EQ(c[0].name, "phi1_1");
  EXPECT_EQ(c[2].name, "A1_1_11");
  EXPECT_EQ(c[3].name, "A1_1_21");
  EXPECT_EQ(c[3].value, 0.2);
  EXPECT_EQ(c[12].name, "B1_11");
  EXPECT_EQ(c[20].name, "c");
  EXPECT_EQ(c[25].name, "lambda_2");
}

TEST(MonteCarlo, ZeroReplicationsGiveEmptyTable) {
  McDesign d = default_mc_design(1);
  d.replications = 0;
  const McReport r = run_mc(d);
  EXPECT_TRUE(r.cells.empty());
  EXPECT_FALSE(r.failed);
}

TEST(MonteCarlo, SmallRun) {
  McDesign d = default_mc_design(1);
  d.sample_sizes = {300};
  d.replications = 2;
  d.estimate.rounds = 2;
  d.estimate.ga.generations = 10;
  Index calls = 0;
  const McReport r = run_mc(d, [&](Index, Index, bool) { ++calls; });
  EXPECT_EQ(calls, 2);
  EXPECT_FALSE(r.failed);
  ASSERT_EQ(r.cells.size(), 26u);
  const McCell* b = r.find("B1_11", 300);
  ASSERT_NE(b, nullptr);
  EXPECT_EQ(b->count, 2);
  EXPECT_TRUE(std::isfinite(b->sd));
  std::ostringstream out;
  write_mc_report(out, r, Provenance{});
  EXPECT_NE(out.str().find("\nparameter,T,mean_error,sd\n"), std::string::npos);
  EXPECT_NE(out.str().find("\nB1_11,300,"), std::string::npos);
}

TEST(MonteCarlo, DefaultsMatchHarnessBudget) {
  const McDesign d = default_mc_design(2);
  EXPECT_EQ(d.estimate.rounds, 8);
  EXPECT_EQ(d.estimate.ga.generations, 100);
  EXPECT_EQ(d.replications, 25);
}
