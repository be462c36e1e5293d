#include "wpca/cli/commands.hpp"

#include <fstream>
#include <iostream>
#include <memory>

#include <CLI11.hpp>

#include "wpca/asymptotics.hpp"
#include "wpca/montecarlo.hpp"
#include "wpca/sampling.hpp"
#include "wpca/weighting.hpp"

namespace wpca::cli {

namespace {

std::int64_t as_int(std::size_t v) { return static_cast<std::int64_t>(v); }

WeightScheme build_scheme(const SchemeChoice& s, const NoiseProfile& noise,
                          double theta2, Normalization norm) {
  switch (s.kind) {
    case WeightKind::custom:
      return make_custom_scheme(s.values, noise, norm);
    case WeightKind::binary: {
      std::vector<bool> mask;
      for (double v : s.values) mask.push_back(v != 0.0);
      return make_scheme(s.kind, noise, std::nullopt, std::move(mask), norm);
    }
    case WeightKind::optimal:
      return make_scheme(s.kind, noise, theta2, std::nullopt, norm);
    default:
      return make_scheme(s.kind, noise, std::nullopt, std::nullopt, norm);
  }
}

void add_trial_rows(Table& t, const TrialRecord& r, const SweepSpec& spec,
                    std::optional<double> lambda) {
  const double lam = lambda.value_or(std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i <= spec.spike.k(); ++i) {
    for (Metric m : spec.metrics) {
      if ((m == Metric::mse) != (i == 0)) continue;
      const std::size_t comp = i == 0 ? 0 : i - 1;
      t.add_row({as_int(i), std::string(to_string(m)), metric_value(r, m, comp),
                 metric_prediction(r, m, comp), r.seed, lam});
    }
  }
}

}  // namespace

Table cmd_predict(const PredictConfig& config) {
  Table t;
  t.columns = {"theta2", "scheme", "alpha", "beta", "r_theta", "r_u", "r_z",
               "cross", "above_transition", "truncated"};
  for (double theta2 : config.amplitudes) {
    for (const auto& s : config.schemes) {
      const auto scheme = build_scheme(s, config.noise, theta2, config.normalization);
      const AsymptoticConfig cfg(config.c, config.noise, scheme.per_group, config.root_tol);
      const auto p = predict(cfg, theta2);
      t.add_row({theta2, s.label, p.alpha, p.beta, p.amplitude_limit,
                 p.component_recovery, p.score_recovery, p.cross_product,
                 p.above_transition, p.truncated});
    }
  }
  return t;
}

Table cmd_weights(const WeightsConfig& config) {
  Table t;
  t.columns = {"group", "p", "sigma2", "w2_uniform", "w2_inverse",
               "w2_square_inverse", "w2_optimal"};
  std::vector<std::vector<double>> cols;
  for (auto kind : {WeightKind::uniform, WeightKind::inverse_variance,
                    WeightKind::square_inverse_variance, WeightKind::optimal}) {
    const auto theta2 = kind == WeightKind::optimal ? std::optional(config.theta2)
                                                    : std::nullopt;
    cols.push_back(
        make_scheme(kind, config.noise, theta2, std::nullopt, config.normalization)
            .per_group);
  }
  for (std::size_t l = 0; l < config.noise.size(); ++l) {
    t.add_row({as_int(l + 1), config.noise.proportion(l), config.noise.variance(l),
               cols[0][l], cols[1][l], cols[2][l], cols[3][l]});
  }
  t.metadata.emplace_back("theta2", format_double(config.theta2));
  t.metadata.emplace_back("normalization", std::string(to_string(config.normalization)));
  return t;
}

Table cmd_sample_plan(const SamplePlanConfig& config) {
  const auto& problem = config.problem;
  const std::size_t L = problem.size();
  Table t;
  t.columns = {"kind", "index"};
  for (std::size_t l = 0; l < L; ++l) t.columns.push_back("c_" + std::to_string(l + 1));
  t.columns.push_back("recovery");
  t.columns.push_back("saturated");

  const auto vertices = enumerate_vertices(problem);
  const auto plan = optimize_sampling(problem);
  const auto variances = problem.variances();

  std::int64_t best = -1;
  for (std::size_t v = 0; v < vertices.size(); ++v) {
    if (vertices[v] == plan.allocation) best = as_int(v);
  }
  auto row = [&](std::string kind, std::int64_t index,
                 const std::vector<double>& alloc, double recovery) {
    std::vector<Cell> r{std::move(kind), index};
    for (double c : alloc) r.emplace_back(c);
    r.emplace_back(recovery);
    r.emplace_back(problem.saturated(alloc));
    t.add_row(std::move(r));
  };
  row("optimum", best, plan.allocation, plan.recovery);
  for (std::size_t v = 0; v < vertices.size(); ++v) {
    row("vertex", as_int(v), vertices[v],
        recovery_for_allocation(vertices[v], variances, problem.theta2()));
  }
  t.metadata.emplace_back("theta2", format_double(problem.theta2()));
  t.metadata.emplace_back("budget", format_double(problem.budget()));
  return t;
}

Table cmd_sweep(const SweepConfig& config) {
  const SweepTable sweep = run_sweep(config.spec);
  Table t;
  t.columns = {"lambda", "component_index", "metric", "mean", "q25", "q75",
               "prediction", "n", "d", "trials"};
  for (const auto& r : sweep.rows) {
    t.add_row({r.lambda, as_int(r.component), std::string(to_string(r.metric)), r.mean,
               r.q25, r.q75, r.prediction, as_int(sweep.n), as_int(sweep.d),
               as_int(sweep.trials)});
  }
  t.metadata.emplace_back("quantiles", std::string(SweepTable::quantile_convention));
  t.metadata.emplace_back("base_seed", std::to_string(config.spec.base_seed));
  return t;
}

Table cmd_simulate(const SimulateConfig& config) {
  const auto& spec = config.spec;
  TrialRecord record =
      config.lambda ? run_trial(spec, 0, config.trial_index)
                    : run_weighted_trial(spec, config.group_weights,
                                         trial_seed(spec.base_seed, 0, config.trial_index));
  Table t;
  t.columns = {"component_index", "metric", "value", "prediction", "seed", "lambda"};
  add_trial_rows(t, record, spec, config.lambda);
  t.metadata.emplace_back("n", std::to_string(spec.n));
  t.metadata.emplace_back("d", std::to_string(spec.d));
  t.metadata.emplace_back("trial_index", std::to_string(config.trial_index));
  return t;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Weighted PCA for heteroscedastic data", "wpca"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::string format;
  Overrides overrides;
  std::uint64_t seed = 0;
  std::size_t threads = 0;

  const std::pair<const char*, const char*> commands[] = {
      {"predict", "Asymptotic recovery for each amplitude and weight scheme"},
      {"weights", "Standard weight schemes for a noise profile"},
      {"sample-plan", "Budget-constrained sampling design"},
      {"sweep", "Monte Carlo weight sweep"},
      {"simulate", "One Monte Carlo trial"},
  };
  std::vector<CLI::App*> subs;
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "Experiment config (YAML)")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", out_path, "Output file (default stdout)");
    sub->add_option("--format", format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--seed", seed, "Override the base seed");
    sub->add_option("--threads", threads, "Worker threads")
        ->check(CLI::PositiveNumber);
    sub->add_flag("--paper-scale", overrides.paper_scale,
                  "500 trials with d = 10000");
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  CLI::App* sub = nullptr;
  for (CLI::App* s : subs) {
    if (s->parsed()) sub = s;
  }
  if (sub->count("--seed") > 0) overrides.seed = seed;
  if (sub->count("--threads") > 0) overrides.threads = threads;
  if (format.empty()) {
    format = out_path.size() >= 5 && out_path.ends_with(".json") ? "json" : "csv";
  }

  const std::string name = sub->get_name();
  Table table;
  try {
    const std::string text = read_text_file(config_path);
    if (name == "predict") {
      table = cmd_predict(parse_predict_config(text, config_path));
    } else if (name == "weights") {
      table = cmd_weights(parse_weights_config(text, config_path));
    } else if (name == "sample-plan") {
      table = cmd_sample_plan(parse_sample_plan_config(text, config_path));
    } else if (name == "sweep") {
      table = cmd_sweep(parse_sweep_config(text, config_path, overrides));
    } else {
      table = cmd_simulate(parse_simulate_config(text, config_path, overrides));
    }
  } catch (const ConfigError& e) {
    err << "wpca " << name << ": config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "wpca " << name << ": error: " << e.what() << '\n';
    return kExitRuntimeError;
  }

  std::unique_ptr<std::ofstream> file;
  std::ostream* sink = &out;
  if (!out_path.empty()) {
    file = std::make_unique<std::ofstream>(out_path, std::ios::binary);
    if (!*file) {
      err << "wpca " << name << ": cannot open " << out_path << '\n';
      return kExitRuntimeError;
    }
    sink = file.get();
  }
  if (format == "json") {
    write_json(*sink, table);
  } else {
    write_csv(*sink, table);
  }
  sink->flush();
  if (!*sink) {
    err << "wpca " << name << ": write failed\n";
    return kExitRuntimeError;
  }
  return kExitOk;
}

}  // namespace wpca::cli
