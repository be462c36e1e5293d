#include "wpca/montecarlo.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>

#include "wpca/errors.hpp"
#include "wpca/roots.hpp"

namespace wpca {

namespace {

constexpr std::array<std::pair<Metric, std::string_view>, 6> kMetricNames{{
    {Metric::component, "component"},
    {Metric::score_weighted, "score_weighted"},
    {Metric::score_unweighted, "score_unweighted"},
    {Metric::amplitude, "amplitude"},
    {Metric::cross, "cross"},
    {Metric::mse, "mse"},
}};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

double metric_value(const TrialRecord& r, Metric m, std::size_t i) {
  if (m == Metric::mse) return r.mse;
  if (i >= r.components.size()) return 0.0;  // rank-deficient fit
  const auto& c = r.components[i];
  switch (m) {
    case Metric::component: return c.component.matched;
    case Metric::score_weighted: return c.score_weighted.matched;
    case Metric::score_unweighted: return c.score_unweighted;
    case Metric::amplitude: return c.amplitude;
    case Metric::cross: return c.cross;
    case Metric::mse: break;
  }
  return 0.0;
}

double metric_prediction(const TrialRecord& r, Metric m, std::size_t i) {
  if (m == Metric::mse) return r.mse_prediction;
  const auto& p = r.predictions.at(i);
  switch (m) {
    case Metric::component: return p.component_recovery;
    case Metric::score_weighted: return p.score_recovery;
    case Metric::score_unweighted: return std::numeric_limits<double>::quiet_NaN();
    case Metric::amplitude: return p.amplitude_limit;
    case Metric::cross: return p.cross_product;
    case Metric::mse: break;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

std::string_view to_string(Metric metric) {
  for (const auto& [m, name] : kMetricNames)
    if (m == metric) return name;
  return "unknown";
}

std::optional<Metric> parse_metric(std::string_view name) {
  for (const auto& [m, n] : kMetricNames)
    if (n == name) return m;
  return std::nullopt;
}

void SweepSpec::validate() const {
  if (noise.size() != 2) {
    throw std::invalid_argument("weight sweeps need exactly two noise groups");
  }
  if (trials < 1) throw std::invalid_argument("trials must be at least 1");
  if (d < spike.k() || n < spike.k()) {
    throw std::invalid_argument("d and n must be at least k");
  }
  const double ratio = static_cast<double>(n) / static_cast<double>(d);
  if (std::abs(spike.c() - ratio) > 1e-12 * ratio) {
    throw std::invalid_argument("spike c must equal n / d");
  }
  if (lambda_grid.empty()) throw std::invalid_argument("lambda grid is empty");
  for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
    const double lam = lambda_grid[i];
    if (!(lam >= 0.0 && lam <= 1.0)) {
      throw std::invalid_argument("lambda values must lie in [0, 1]");
    }
    if (i > 0 && lam < lambda_grid[i - 1]) {
      throw std::invalid_argument("lambda grid must be sorted");
    }
  }
  if (metrics.empty()) throw std::invalid_argument("no metrics requested");
  if (threads < 1) throw std::invalid_argument("threads must be at least 1");
}

std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t lambda_index,
                         std::size_t trial_index) {
  std::uint64_t h = splitmix64(base_seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(lambda_index));
  h = splitmix64(h ^ static_cast<std::uint64_t>(trial_index));
  return h;
}

std::vector<double> lambda_weights(const NoiseProfile& noise, double lambda) {
  if (noise.size() != 2) {
    throw std::invalid_argument("lambda weights need exactly two noise groups");
  }
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw std::invalid_argument("lambda must lie in [0, 1]");
  }
  const double p1 = noise.proportion(0);
  const double p2 = noise.proportion(1);
  if ((p1 == 0.0 && lambda < 1.0) || (p2 == 0.0 && lambda > 0.0)) {
    throw std::invalid_argument("lambda weights divide by a zero proportion");
  }
  return {p1 > 0.0 ? (1.0 - lambda) / p1 : 0.0, p2 > 0.0 ? lambda / p2 : 0.0};
}

TrialRecord run_weighted_trial(const SweepSpec& spec,
                               std::span<const double> group_weights,
                               std::uint64_t seed) {
  const auto data = generate_dataset(spec.spike, spec.noise, spec.d, spec.n,
                                     spec.score_distribution, seed);
  const auto weights = SampleWeights::from_groups(data.noise_labels, group_weights);
  const std::size_t k = spec.spike.k();
  const WpcaFit fit = fit_wpca(data.data, weights, k);

  TrialRecord r;
  r.seed = seed;
  r.group_weights.assign(group_weights.begin(), group_weights.end());
  r.rank_deficient = fit.rank_deficient;
  for (std::size_t i = 0; i < fit.k(); ++i) {
    ComponentMetrics m;
    m.amplitude = fit.amplitudes(static_cast<Eigen::Index>(i));
    m.component = empirical_component_recovery(fit, data, spec.spike, i);
    m.score_weighted = empirical_score_recovery(fit, data, spec.spike, i);
    m.score_unweighted = empirical_unweighted_score_recovery(fit, data, spec.spike, i);
    m.cross = empirical_cross_product(fit, data, spec.spike, i);
    r.components.push_back(m);
  }
  r.mse = empirical_weighted_mse(fit, data);

  const AsymptoticConfig cfg(spec.spike.c(), spec.noise, r.group_weights);
  for (double theta2 : spec.spike.amplitudes()) {
    r.predictions.push_back(predict(cfg, theta2));
  }
  r.mse_prediction = aggregate_prediction(cfg, spec.spike).weighted_mse;
  return r;
}

TrialRecord run_trial(const SweepSpec& spec, std::size_t lambda_index,
                      std::size_t trial_index) {
  spec.validate();
  if (lambda_index >= spec.lambda_grid.size()) {
    throw std::out_of_range("lambda index out of range");
  }
  const double lambda = spec.lambda_grid[lambda_index];
  const auto weights = lambda_weights(spec.noise, lambda);
  TrialRecord r = run_weighted_trial(
      spec, weights, trial_seed(spec.base_seed, lambda_index, trial_index));
  r.lambda = lambda;
  r.lambda_index = lambda_index;
  r.trial_index = trial_index;
  return r;
}

double quantile_linear(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw std::invalid_argument("quantile of empty data");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

SweepTable run_sweep(const SweepSpec& spec) {
  std::vector<TrialRecord> records;
  return run_sweep(spec, records);
}

SweepTable run_sweep(const SweepSpec& spec, std::vector<TrialRecord>& records) {
  spec.validate();
  const std::size_t n_lambda = spec.lambda_grid.size();
  const std::size_t total = n_lambda * spec.trials;
  records.assign(total, TrialRecord{});

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t job = next.fetch_add(1);
      if (job >= total) return;
      try {
        records[job] = run_trial(spec, job / spec.trials, job % spec.trials);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(total);
        return;
      }
    }
  };
  const std::size_t n_threads = std::min(spec.threads, total);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  SweepTable table;
  table.n = spec.n;
  table.d = spec.d;
  table.trials = spec.trials;
  std::vector<double> values(spec.trials);
  for (std::size_t li = 0; li < n_lambda; ++li) {
    const auto* first = &records[li * spec.trials];
    for (std::size_t i = 0; i <= spec.spike.k(); ++i) {
      for (Metric m : kAllMetrics) {
        if (std::find(spec.metrics.begin(), spec.metrics.end(), m) ==
            spec.metrics.end()) {
          continue;
        }
        // Whole-fit metrics use component 0; per-component metrics 1..k.
        if ((m == Metric::mse) != (i == 0)) continue;
        const std::size_t comp = i == 0 ? 0 : i - 1;
        double sum = 0.0;
        for (std::size_t t = 0; t < spec.trials; ++t) {
          values[t] = metric_value(first[t], m, comp);
          sum += values[t];
        }
        SweepRow row;
        row.lambda = spec.lambda_grid[li];
        row.component = i;
        row.metric = m;
        row.mean = sum / static_cast<double>(spec.trials);
        std::vector<double> sorted = values;
        std::sort(sorted.begin(), sorted.end());
        row.q25 = quantile_linear(sorted, 0.25);
        row.q75 = quantile_linear(sorted, 0.75);
        row.prediction = metric_prediction(first[0], m, comp);
        table.rows.push_back(row);
      }
    }
  }
  return table;
}

double debias_amplitude(double observed, const AsymptoticConfig& cfg) {
  const double c = cfg.c();
  const double alpha = largest_root_A(cfg);
  const double bulk = alpha * eval_C(alpha, cfg) / c;
  if (!(observed > bulk)) {
    throw BelowTransitionError("observed amplitude " + std::to_string(observed) +
                               " is at or below the bulk value " +
                               std::to_string(bulk) + " (below transition)");
  }

  // beta(theta^2) reaches alpha where B(alpha) = 0.
  double inv = 0.0;
  for (std::size_t l = 0; l < cfg.noise().size(); ++l) {
    if (!cfg.active(l)) continue;
    inv += cfg.noise().proportion(l) * cfg.weights()[l] /
           (alpha - cfg.weights()[l] * cfg.noise().variance(l));
  }
  const double critical = 1.0 / (c * inv);

  // Above the transition the amplitude limit beta C(beta) / c increases in
  // theta^2, because d/dx [x C(x)] = A(x) > 0 for x > alpha.
  auto excess = [&](double theta2) {
    const double beta = largest_root_B(cfg, theta2);
    return beta * eval_C(beta, cfg) / c - observed;
  };
  double hi = std::max(2.0 * critical, observed);
  for (int t = 0; excess(hi) <= 0.0; ++t) {
    if (t > roots::kMaxDoublings) {
      throw BracketError("amplitude inversion bracket expansion failed");
    }
    hi *= 2.0;
  }
  return roots::solve_increasing(excess, nullptr, critical, hi, 0.0);
}

}  // namespace wpca
