#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "wpca/asymptotics.hpp"
#include "wpca/estimator.hpp"
#include "wpca/model.hpp"

namespace wpca {

enum class Metric {
  component,
  score_weighted,
  score_unweighted,
  amplitude,
  cross,
  mse,
};

inline constexpr Metric kAllMetrics[] = {
    Metric::component, Metric::score_weighted, Metric::score_unweighted,
    Metric::amplitude, Metric::cross,          Metric::mse,
};

std::string_view to_string(Metric metric);
std::optional<Metric> parse_metric(std::string_view name);

/// A weight sweep over lambda in [0, 1] for two noise groups, where the
/// weights are w_1^2 = (1 - lambda) / p_1 and w_2^2 = lambda / p_2
/// (so p_1 w_1^2 + p_2 w_2^2 = 1).
struct SweepSpec {
  SpikeModel spike;
  NoiseProfile noise;
  std::size_t d = 0;
  std::size_t n = 0;
  std::size_t trials = 1;
  std::vector<double> lambda_grid;
  std::uint64_t base_seed = 0;
  std::vector<Metric> metrics{std::begin(kAllMetrics), std::end(kAllMetrics)};
  ScoreDistribution score_distribution = ScoreDistribution::gaussian;
  std::size_t threads = 1;

  /// Throws std::invalid_argument on an inconsistent spec: the grid must be
  /// sorted inside [0, 1], trials >= 1, spike.c() == n / d and L == 2.
  void validate() const;
};

/// Empirical metrics of one estimated component.
struct ComponentMetrics {
  double amplitude = 0.0;  ///< theta_hat_i^2
  RecoveryPair component;
  RecoveryPair score_weighted;
  double score_unweighted = 0.0;
  double cross = 0.0;
};

struct TrialRecord {
  double lambda = 0.0;
  std::size_t lambda_index = 0;
  std::size_t trial_index = 0;
  std::uint64_t seed = 0;
  std::vector<double> group_weights;
  std::vector<ComponentMetrics> components;
  std::vector<RecoveryPrediction> predictions;
  double mse = 0.0;
  double mse_prediction = 0.0;
  bool rank_deficient = false;
};

/// Per-trial seed: a splitmix64 mix of the three inputs. Depends only on its
/// arguments, so trials can run in any order.
std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t lambda_index,
                         std::size_t trial_index);

/// Group weights ((1 - lambda) / p_1, lambda / p_2).
std::vector<double> lambda_weights(const NoiseProfile& noise, double lambda);

/// Generates a dataset from `seed`, fits WPCA with the given per-group
/// weights and attaches the matching asymptotic predictions.
TrialRecord run_weighted_trial(const SweepSpec& spec,
                               std::span<const double> group_weights,
                               std::uint64_t seed);

/// One trial at spec.lambda_grid[lambda_index].
TrialRecord run_trial(const SweepSpec& spec, std::size_t lambda_index,
                      std::size_t trial_index);

/// Empirical value of metric m for 0-based component i (ignored for mse).
/// Components missing from a rank-deficient fit read as 0.
double metric_value(const TrialRecord& record, Metric m, std::size_t i);

/// Asymptotic counterpart of metric_value; NaN for score_unweighted.
double metric_prediction(const TrialRecord& record, Metric m, std::size_t i);

struct SweepRow {
  double lambda = 0.0;
  std::size_t component = 0;  ///< 1-based; 0 for whole-fit metrics (mse)
  Metric metric = Metric::component;
  double mean = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
  double prediction = 0.0;  ///< NaN when no asymptotic counterpart exists
};

struct SweepTable {
  std::vector<SweepRow> rows;
  std::size_t n = 0;
  std::size_t d = 0;
  std::size_t trials = 0;
  static constexpr std::string_view quantile_convention = "linear";
};

/// Linear-interpolation quantile of sorted data (position q (N - 1)).
double quantile_linear(std::span<const double> sorted, double q);

/// Runs every (lambda, trial) pair, on spec.threads worker threads, and
/// aggregates per lambda in trial-index order. Results do not depend on the
/// thread count.
SweepTable run_sweep(const SweepSpec& spec);

/// Same as run_sweep but also returns the raw trial records, indexed
/// [lambda_index * trials + trial_index].
SweepTable run_sweep(const SweepSpec& spec, std::vector<TrialRecord>& records);

/// Inverts the amplitude limit: the theta^2 whose predicted WPCA amplitude
/// equals `observed`. Throws BelowTransitionError when observed does not
/// exceed the bulk value (1/c) alpha C(alpha).
double debias_amplitude(double observed, const AsymptoticConfig& cfg);

}  // namespace wpca
