#include <cmath>

#include <gtest/gtest.h>

#include "wpca/errors.hpp"
#include "wpca/montecarlo.hpp"

namespace wpca {
namespace {

SweepSpec small_spec(std::size_t d = 60, std::size_t trials = 3) {
  return SweepSpec{SpikeModel(1.0, {25.0, 16.0}),
                   NoiseProfile({{0.2, 1.0}, {0.8, 4.0}}),
                   d,
                   d,
                   trials,
                   {0.0, 0.5, 0.8, 1.0},
                   99};
}

TEST(TrialSeed, DeterministicAndDistinct) {
  EXPECT_EQ(trial_seed(1, 2, 3), trial_seed(1, 2, 3));
  EXPECT_NE(trial_seed(1, 2, 3), trial_seed(1, 3, 2));
  EXPECT_NE(trial_seed(1, 2, 3), trial_seed(2, 2, 3));
  EXPECT_NE(trial_seed(0, 0, 0), trial_seed(0, 0, 1));
}

TEST(LambdaWeights, Parameterization) {
  const NoiseProfile noise({{0.2, 1.0}, {0.8, 4.0}});
  const auto w0 = lambda_weights(noise, 0.0);
  EXPECT_DOUBLE_EQ(w0[0], 5.0);
  EXPECT_EQ(w0[1], 0.0);
  const auto unif = lambda_weights(noise, 0.8);
  EXPECT_NEAR(unif[0], 1.0, 1e-15);
  EXPECT_NEAR(unif[1], 1.0, 1e-15);
  // Inverse noise variance weights.
  const double lam = (0.8 / 4.0) / (0.2 / 1.0 + 0.8 / 4.0);
  const auto inv = lambda_weights(noise, lam);
  EXPECT_NEAR(inv[1] / inv[0], 1.0 / 4.0, 1e-15);
  for (double l : {0.0, 0.3, 1.0}) {
    const auto w = lambda_weights(noise, l);
    EXPECT_NEAR(0.2 * w[0] + 0.8 * w[1], 1.0, 1e-15);
  }
  EXPECT_THROW(lambda_weights(noise, 1.5), std::invalid_argument);
  EXPECT_THROW(lambda_weights(NoiseProfile({{1.0, 1.0}}), 0.5), std::invalid_argument);
  const NoiseProfile empty_second({{1.0, 1.0}, {0.0, 4.0}});
  EXPECT_NO_THROW(lambda_weights(empty_second, 0.0));
  EXPECT_THROW(lambda_weights(empty_second, 0.5), std::invalid_argument);
}

TEST(RunTrial, UniformLambdaIsUnweightedPca) {
  // p = (1/4, 3/4) makes lambda = p_2 give weights of exactly one.
  SweepSpec spec = small_spec();
  spec.noise = NoiseProfile({{0.25, 1.0}, {0.75, 4.0}});
  spec.lambda_grid = {0.75};
  const auto weighted = run_trial(spec, 0, 2);
  EXPECT_EQ(weighted.group_weights, (std::vector<double>{1.0, 1.0}));
  const std::vector<double> ones{1.0, 1.0};
  const auto plain = run_weighted_trial(spec, ones, weighted.seed);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(weighted.components[i].component.matched, plain.components[i].component.matched);
    EXPECT_EQ(weighted.components[i].amplitude, plain.components[i].amplitude);
  }
}

TEST(RunTrial, DeterministicRecords) {
  const auto spec = small_spec();
  const auto a = run_trial(spec, 1, 2);
  const auto b = run_trial(spec, 1, 2);
  EXPECT_EQ(a.seed, b.seed);
  EXPECT_EQ(a.seed, trial_seed(spec.base_seed, 1, 2));
  EXPECT_EQ(a.mse, b.mse);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(a.components[i].component.matched, b.components[i].component.matched);
    EXPECT_EQ(a.components[i].cross, b.components[i].cross);
  }
  EXPECT_DOUBLE_EQ(a.lambda, 0.5);
  EXPECT_EQ(a.predictions.size(), 2u);
}

TEST(RunTrial, MetricsStayInBounds) {
  // Score metrics are bounded by the sample weighted norm of z, which only
  // concentrates near one at realistic sizes; component recovery is always
  // a squared cosine.
  const auto tiny = small_spec(40, 1);
  const auto real = small_spec(1000, 1);
  for (std::size_t li = 0; li < tiny.lambda_grid.size(); ++li) {
    for (std::size_t t = 0; t < 5; ++t) {
      for (const auto& m : run_trial(tiny, li, t).components) {
        EXPECT_GE(m.component.matched, 0.0);
        EXPECT_LE(m.component.matched + m.component.mismatched, 1.0 + 1e-12);
      }
    }
    for (const auto& m : run_trial(real, li, 0).components) {
      for (double v : {m.component.matched, m.component.mismatched, m.score_weighted.matched,
                       m.score_unweighted, m.cross}) {
        EXPECT_GE(v, -1.05);
        EXPECT_LE(v, 1.05);
      }
    }
  }
}

TEST(RunSweep, SingleTrialAggregation) {
  auto spec = small_spec(40, 1);
  std::vector<TrialRecord> records;
  const auto table = run_sweep(spec, records);
  ASSERT_EQ(records.size(), spec.lambda_grid.size());
  for (const auto& row : table.rows) {
    EXPECT_EQ(row.mean, row.q25);
    EXPECT_EQ(row.mean, row.q75);
  }
  const std::size_t per_lambda = 1 + 2 * 5;  // mse plus five metrics per component
  EXPECT_EQ(table.rows.size(), spec.lambda_grid.size() * per_lambda);
}

TEST(RunSweep, RowsMatchRecords) {
  const auto spec = small_spec(40, 4);
  std::vector<TrialRecord> records;
  const auto table = run_sweep(spec, records);
  for (const auto& row : table.rows) {
    if (row.metric != Metric::component || row.component != 1) continue;
    std::size_t li = 0;
    while (spec.lambda_grid[li] != row.lambda) ++li;
    double sum = 0.0;
    for (std::size_t t = 0; t < 4; ++t) sum += records[li * 4 + t].components[0].component.matched;
    EXPECT_DOUBLE_EQ(row.mean, sum / 4.0);
    EXPECT_EQ(row.prediction, records[li * 4].predictions[0].component_recovery);
  }
}

TEST(RunSweep, ThreadCountDoesNotChangeResults) {
  auto spec = small_spec(50, 5);
  const auto serial = run_sweep(spec);
  spec.threads = 3;
  const auto parallel = run_sweep(spec);
  ASSERT_EQ(serial.rows.size(), parallel.rows.size());
  for (std::size_t r = 0; r < serial.rows.size(); ++r) {
    EXPECT_EQ(serial.rows[r].mean, parallel.rows[r].mean);
    EXPECT_EQ(serial.rows[r].q25, parallel.rows[r].q25);
    EXPECT_EQ(serial.rows[r].q75, parallel.rows[r].q75);
  }
}

TEST(RunSweep, MetricSelectionAndUnweightedPrediction) {
  auto spec = small_spec(40, 2);
  spec.metrics = {Metric::score_unweighted, Metric::mse};
  const auto table = run_sweep(spec);
  EXPECT_EQ(table.rows.size(), spec.lambda_grid.size() * 3);
  for (const auto& row : table.rows) {
    if (row.metric == Metric::score_unweighted) {
      EXPECT_TRUE(std::isnan(row.prediction));
      EXPECT_GE(row.component, 1u);
    } else {
      EXPECT_EQ(row.component, 0u);
      EXPECT_FALSE(std::isnan(row.prediction));
    }
  }
}

TEST(SweepSpec, Validation) {
  auto bad = small_spec();
  bad.lambda_grid = {0.5, 0.2};
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = small_spec();
  bad.lambda_grid = {0.0, 1.2};
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = small_spec();
  bad.trials = 0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = small_spec();
  bad.n = 2 * bad.d;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = small_spec();
  bad.lambda_grid.clear();
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  EXPECT_NO_THROW(small_spec().validate());
}

TEST(Quantiles, LinearInterpolation) {
  const std::vector<double> v{1.0, 2.0, 4.0, 8.0};
  EXPECT_DOUBLE_EQ(quantile_linear(v, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(quantile_linear(v, 1.0), 8.0);
  EXPECT_DOUBLE_EQ(quantile_linear(v, 0.25), 1.75);
  EXPECT_DOUBLE_EQ(quantile_linear(v, 0.75), 5.0);
  const std::vector<double> one{3.0};
  EXPECT_DOUBLE_EQ(quantile_linear(one, 0.25), 3.0);
}

TEST(Debias, RoundTripHomoscedastic) {
  const AsymptoticConfig cfg(4.0, NoiseProfile({{1.0, 1.0}}), {1.0});
  EXPECT_NEAR(debias_amplitude(85.0 / 16.0, cfg), 4.0, 1e-8);
}

TEST(Debias, BulkValueIsBelowTransition) {
  const AsymptoticConfig cfg(4.0, NoiseProfile({{1.0, 1.0}}), {1.0});
  const double alpha = largest_root_A(cfg);
  const double bulk = alpha * eval_C(alpha, cfg) / 4.0;
  EXPECT_THROW(debias_amplitude(bulk, cfg), BelowTransitionError);
  EXPECT_THROW(debias_amplitude(0.5 * bulk, cfg), BelowTransitionError);
}

TEST(Debias, RoundTripTwoGroups) {
  const AsymptoticConfig cfg(1.0, NoiseProfile({{0.2, 1.0}, {0.8, 4.0}}), {1.0, 1.0});
  for (double theta2 : {25.0, 16.0, 8.0}) {
    const double observed = predict(cfg, theta2).amplitude_limit;
    EXPECT_NEAR(debias_amplitude(observed, cfg), theta2, 1e-8);
  }
}

TEST(Metrics, Names) {
  for (Metric m : kAllMetrics) EXPECT_EQ(parse_metric(to_string(m)), m);
  EXPECT_FALSE(parse_metric("bogus"));
}

}  // namespace
}  // namespace wpca
