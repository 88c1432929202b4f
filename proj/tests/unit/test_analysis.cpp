#include <gtest/gtest.h>

#include <cmath>

#include "mtsched/analysis/analysis.hpp"
#include "mtsched/core/errors.hpp"
#include "oracles.hpp"

using namespace mts;

TEST(Firing, FractionOfLargeActivations) {
  EXPECT_DOUBLE_EQ(firing_fraction(std::vector<double>{0.5, -0.4, 0.1, 0.2}), 0.5);
  EXPECT_DOUBLE_EQ(firing_fraction(std::vector<double>(7, 0.5)), 1.0);
  EXPECT_DOUBLE_EQ(firing_fraction(std::vector<double>{0.3, -0.3, 0.29}), 2.0 / 3.0);
  EXPECT_EQ(firing_fraction(std::vector<double>{}), 0.0);
}

TEST(Firing, ProbeNetworkUnitsAreClassified) {
  const auto p = oracle::shared_and_specific_probe();
  EvalSpec spec;
  spec.episodes = 10;
  spec.seed = 1;
  const auto f = firing_matrix(p.net, p.inst, spec);
  ASSERT_EQ(f.tasks(), 2u);
  ASSERT_EQ(f.units(), 2u);
  EXPECT_EQ(f.f[0][0], 1.0);
  EXPECT_EQ(f.f[1][0], 1.0);
  EXPECT_EQ(f.f[0][1], 1.0);
  EXPECT_EQ(f.f[1][1], 0.0);
  EXPECT_EQ(f.task_count(p.shared_unit), 2u);
  EXPECT_EQ(f.task_count(p.specific_unit), 1u);
  EXPECT_TRUE(f.fires_for(0, p.specific_unit));
  EXPECT_FALSE(f.fires_for(1, p.specific_unit));
}

TEST(Firing, ClampedUnitNeverFires) {
  const auto p = oracle::shared_and_specific_probe();
  EvalSpec spec;
  spec.episodes = 2;
  spec.clamp_unit = 0;
  const auto f = firing_matrix(p.net, p.inst, spec);
  EXPECT_EQ(f.task_count(0), 0u);
}

TEST(SortNeurons, CountsThenSumsThenIndex) {
  FiringMatrix f;
  f.f = {{1.0, 0.0}, {1.0, 0.0}, {1.0, 0.0}, {1.0, 0.0}, {1.0, 0.5}, {1.0, 0.5}};
  auto o = sort_neurons(f);
  EXPECT_EQ(o.order, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(o.task_counts, (std::vector<std::size_t>{6, 2}));

  f.f = {{0.2, 0.4}, {0.3, 0.5}};
  o = sort_neurons(f);
  EXPECT_EQ(o.order, (std::vector<std::size_t>{1, 0}));

  f.f = {{0.2, 0.2, 0.2}, {0.1, 0.1, 0.1}};
  o = sort_neurons(f);
  EXPECT_EQ(o.order, (std::vector<std::size_t>{0, 1, 2}));
}

TEST(SortNeurons, StepCurveIsNonIncreasing) {
  Rng r(3);
  FiringMatrix f;
  f.f.assign(5, std::vector<double>(40));
  for (auto& row : f.f)
    for (double& v : row) v = r.bernoulli(0.5) ? 0.0 : r.uniform() * 0.05;
  const auto o = sort_neurons(f);
  for (std::size_t i = 1; i < o.task_counts.size(); ++i) EXPECT_LE(o.task_counts[i], o.task_counts[i - 1]);
}

TEST(Turnoff, EqualPercentagesGiveZeroVariance) {
  const std::vector<double> base{10, 20, 40};
  const auto t = turnoff_from_scores(base, {{5, 10, 20}});
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(t.A[i][0], 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(t.variance[0], 0.0, 1e-18);
}

TEST(Turnoff, SingleTaskEffectIsOneHotWithLargestVariance) {
  const std::vector<double> base{10, 20, 40, 5};
  const auto t = turnoff_from_scores(base, {{9, 18, 36, 4.5}, {10, 20, 10, 5}, {1, 2, 4, 5}});
  EXPECT_EQ(t.A[2][1], 1.0);
  EXPECT_EQ(t.A[0][1], 0.0);
  EXPECT_GT(t.variance[1], t.variance[0]);
  EXPECT_GT(t.variance[1], t.variance[2]);
  EXPECT_EQ(t.order.back(), 1u);
  for (std::size_t j = 0; j < 3; ++j) {
    double col = 0;
    for (std::size_t i = 0; i < 4; ++i) col += t.A[i][j];
    EXPECT_NEAR(col, 1.0, 1e-9);
  }
}

TEST(Turnoff, ZeroBaselineTasksAreExcluded) {
  const auto t = turnoff_from_scores(std::vector<double>{0, 10, 10}, {{5, 5, 5}});
  EXPECT_FALSE(t.included[0]);
  EXPECT_EQ(t.A[0][0], 0.0);
  EXPECT_DOUBLE_EQ(t.A[1][0], 0.5);
  EXPECT_DOUBLE_EQ(t.variance[0], 0.0);
  EXPECT_THROW(turnoff_from_scores(std::vector<double>{0, 0}, {{1, 1}}), DomainError);
}

TEST(Turnoff, ProbeNetworkOrdersSharedBeforeSpecific) {
  const auto p = oracle::shared_and_specific_probe();
  EvalSpec spec;
  spec.episodes = 20;
  spec.seed = 4;
  const auto t = turnoff_matrix(p.net, p.inst, spec);
  EXPECT_LT(t.variance[p.shared_unit], t.variance[p.specific_unit]);
  EXPECT_EQ(t.order, (std::vector<std::size_t>{p.shared_unit, p.specific_unit}));
  EXPECT_NEAR(t.A[0][p.specific_unit], 1.0, 1e-12);
}

TEST(Turnoff, DeadUnitChangesNothing) {
  auto p = oracle::shared_and_specific_probe();
  p.net.zero_outgoing(1);
  EvalSpec spec;
  spec.episodes = 5;
  spec.seed = 4;
  const auto base = evaluate(p.net, p.inst, spec);
  spec.clamp_unit = 1;
  EXPECT_EQ(evaluate(p.net, p.inst, spec).raw, base.raw);
}

TEST(AnalysisCsv, Shapes) {
  const auto p = oracle::shared_and_specific_probe();
  EvalSpec spec;
  spec.episodes = 2;
  const auto f = firing_matrix(p.net, p.inst, spec);
  const auto o = sort_neurons(f);
  EXPECT_EQ(firing_csv(f, o, p.inst), "unit,task_count,sum_f,f_a,f_b\n0,2,2,1,1\n1,1,1,1,0\n");
  EXPECT_EQ(firing_plot_data(o), "rank,unit,task_count\n0,0,2\n1,1,1\n");
  const auto t = turnoff_from_scores(std::vector<double>{0, 10}, {{5, 5}});
  EXPECT_EQ(turnoff_csv(t, p.inst), "rank,unit,variance,A_a,A_b\n0,0,0,,1\n");
}
