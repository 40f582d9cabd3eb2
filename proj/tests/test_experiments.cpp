#include <gtest/gtest.h>

#include "wedgecp/experiments.hpp"

using namespace wedgecp;

namespace {

ExperimentConfig small(const std::string& experiment) {
  ExperimentConfig c;
  c.experiment = experiment;
  c.lambda = 4.0;
  c.alpha_l = Rational(1, 2);
  c.alpha_r = Rational(3, 2);
  c.m_list = {2, 5, 10};
  c.M = 10;
  c.horizon = 20.0;
  c.replicas = 40;
  c.burn_in = 10.0;
  c.seed = 7;
  return c;
}

}  // namespace

TEST(Config, JsonRoundTrip) {
  auto c = small("survival-curve");
  c.alpha_hat = 2.5;
  c.block_m_list = {Rational(8), Rational(16)};
  const auto back = ExperimentConfig::from_json(c.to_json());
  EXPECT_EQ(back.to_json(), c.to_json());
  EXPECT_EQ(back.hash(), c.hash());
}

TEST(Config, UnknownKeysRejected) {
  auto j = small("survival-curve").to_json();
  j["bogus"] = 1;
  EXPECT_THROW(ExperimentConfig::from_json(j), InvalidArgument);
}

TEST(Config, HashIgnoresThreadsOnly) {
  auto a = small("survival-curve");
  auto b = a;
  b.threads = 4;
  EXPECT_EQ(a.hash(), b.hash());
  b.seed = 8;
  EXPECT_NE(a.hash(), b.hash());
}

TEST(Config, Validation) {
  auto c = small("survival-curve");
  c.replicas = 0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = small("survival-curve");
  c.horizon = -1;
  EXPECT_THROW(c.validate(), InvalidArgument);
}

TEST(Speeds, FractionsOfConfiguredEdgeSpeed) {
  auto c = small("survival-curve");
  c.alpha_l.reset();
  c.alpha_r.reset();
  c.alpha_hat = 2.0;
  const auto w = resolve_speeds(c, c.lambda);
  EXPECT_EQ(w.alpha_l, Rational(3, 5));
  EXPECT_EQ(w.alpha_r, Rational(7, 5));
  EXPECT_FALSE(w.estimate.has_value());
  EXPECT_TRUE(w.warnings.empty());
}

TEST(Survival, PairedMonotonicityIsExact) {
  const auto s = survival_curve(small("survival-curve"));
  ASSERT_EQ(s.points.size(), 3u);
  EXPECT_EQ(s.monotonicity_violations, 0u);
  EXPECT_TRUE(s.nondecreasing);
  for (const auto& p : s.points) {
    EXPECT_LE(p.survival.interval.low, p.survival.estimate);
    EXPECT_GE(p.survival.interval.high, p.survival.estimate);
  }
}

TEST(Survival, ThreadCountDoesNotChangeResults) {
  auto c = small("survival-curve");
  const auto a = run_experiment(c);
  c.threads = 3;
  const auto b = run_experiment(c);
  EXPECT_EQ(a.report.dump(), b.report.dump());
  ASSERT_EQ(a.csv.size(), 1u);
  EXPECT_EQ(a.csv[0].second, b.csv[0].second);
}

TEST(Coupling, HalfSpaceIdentityIsExact) {
  const auto c = coupling_check(small("coupling-check"));
  ASSERT_EQ(c.checkpoints.size(), 4u);
  for (const auto& cp : c.checkpoints) EXPECT_EQ(cp.identity_violations, 0u);
  EXPECT_GT(c.survivors, 0u);
  EXPECT_GE(c.checkpoints.back().disagreement, 0.0);
  EXPECT_LE(c.checkpoints.back().disagreement, 1.0);
}

TEST(EdgeGrowth, SurvivorsStayInsideWedge) {
  const auto c = small("edge-growth");
  const auto e = edge_growth_check(c);
  EXPECT_GT(e.survivors, 0u);
  EXPECT_LE(e.right.estimate, (c.M.to_double() + 1.5 * c.horizon) / c.horizon + 1e-12);
  EXPECT_GE(e.left.estimate, 0.5 - 1e-12);
}

TEST(Lemma2, CommonPointImpliesOpen) {
  auto c = small("lemma2");
  c.block_m_list = {4, 8};
  const auto l = lemma2_check(c);
  ASSERT_EQ(l.points.size(), 2u);
  for (const auto& p : l.points) {
    EXPECT_LE(p.common_point, p.o_event.successes);
    EXPECT_EQ(p.parallelograms, 6u);
    EXPECT_GE(p.bound_tolerance, 0.0);
  }
  EXPECT_EQ(l.paired_difference_z.size(), 1u);
}

TEST(Omega, OpenPathsHaveGraphicalPaths) {
  auto c = small("omega-infinity");
  c.lambda = 6.0;
  c.block_m_list = {16};
  c.rows = 2;
  c.replicas = 20;
  const auto o = omega_infinity_check(c);
  ASSERT_EQ(o.points.size(), 1u);
  EXPECT_GT(o.points[0].graphical_checked, 0u);
  EXPECT_EQ(o.points[0].graphical_failures, 0u);
  EXPECT_LE(o.points[0].open_path.successes, o.points[0].o00.successes);
}

TEST(Gbt, CoexistenceEventsImplyGrowth) {
  ExperimentConfig c;
  c.experiment = "gbt-coexistence";
  c.lambda1 = 4.0;
  c.lambda2 = 2.0;
  c.alpha_hat = 2.9;
  c.alpha_hat2 = 0.7;
  c.horizon = 30.0;
  c.replicas = 40;
  c.seed = 9;
  const auto g = gbt_coexistence(c);
  EXPECT_EQ(g.implication_failures, 0u);
  EXPECT_EQ(g.t0, Rational(c.x0) / g.alpha_l);
  EXPECT_LE(g.omega_all.successes, g.omega1.successes);
  EXPECT_LE(g.omega_all.successes, g.omega2.successes);
  EXPECT_LE(g.omega_all.successes, g.omega3.successes);
  EXPECT_LE(g.omega_all.successes, g.ones.successes);
}

TEST(Gbt, RejectsBadRates) {
  ExperimentConfig c;
  c.lambda1 = 2.0;
  c.lambda2 = 3.0;
  EXPECT_THROW(gbt_coexistence(c), InvalidArgument);
}

TEST(LambdaC, BracketNarrowsToTolerance) {
  ExperimentConfig c;
  c.experiment = "lambda-c";
  c.horizon = 10.0;
  c.replicas = 60;
  c.tolerance = 0.25;
  const auto l = estimate_lambda_c(c);
  EXPECT_LE(l.high - l.low, c.tolerance);
  EXPECT_LE(l.low, l.lambda_c_hat);
  EXPECT_GE(l.high, l.lambda_c_hat);
  EXPECT_GE(l.probes.size(), 2u);
}

TEST(Run, UnknownExperiment) {
  EXPECT_THROW(run_experiment(small("nope")), InvalidArgument);
}

TEST(Run, ReportCarriesReproducibility) {
  const auto c = small("survival-curve");
  const auto r = run_experiment(c);
  EXPECT_EQ(r.report["reproducibility"]["master_seed"], c.seed);
  EXPECT_EQ(r.report["reproducibility"]["config_hash"], c.hash());
  EXPECT_EQ(r.csv[0].second.rfind("M,successes", 0), 0u);
}
