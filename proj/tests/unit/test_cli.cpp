#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "wpca/cli/commands.hpp"
#include "wpca/cli/config.hpp"
#include "wpca/cli/table.hpp"

namespace wpca::cli {
namespace {

namespace fs = std::filesystem;

std::string config_path(const std::string& name) {
  return std::string(WPCA_SOURCE_DIR) + "/configs/" + name;
}

const char* kPredictSix = R"(
c: 150
amplitudes: [1]
noise:
  - {p: 0.1, sigma2: 1}
  - {p: 0.9, sigma2: 5.75}
schemes: [uniform, inverse, square_inverse, optimal]
)";

const char* kSweepSmall = R"(
d: 40
n: 40
trials: 3
seed: 5
amplitudes: [25, 16]
noise:
  - {p: 0.2, sigma2: 1}
  - {p: 0.8, sigma2: 4}
lambda_steps: 11
)";

double number(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&c)) return static_cast<double>(*i);
  ADD_FAILURE() << "not numeric";
  return NAN;
}

std::string temp_file(const std::string& name, const std::string& contents) {
  const fs::path p = fs::temp_directory_path() / ("wpca_cli_test_" + name);
  std::ofstream(p) << contents;
  return p.string();
}

int run_args(std::vector<std::string> args, std::string* out_text = nullptr,
             std::string* err_text = nullptr) {
  args.insert(args.begin(), "wpca");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return code;
}

TEST(Table, FormatDoubleRoundTrips) {
  for (double x : {0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300, 0.875, 1e16, 123456789.0}) {
    EXPECT_EQ(std::strtod(format_double(x).c_str(), nullptr), x);
  }
  EXPECT_EQ(format_double(NAN), "nan");
  EXPECT_EQ(format_double(INFINITY), "inf");
  EXPECT_EQ(format_double(-INFINITY), "-inf");
  EXPECT_EQ(format_double(0.5), "0.5");
}

TEST(Table, CsvQuotingRoundTrip) {
  Table t;
  t.columns = {"name", "value"};
  t.add_row({std::string("a,b"), 1.5});
  t.add_row({std::string("say \"hi\""), std::int64_t{-3}});
  std::stringstream ss;
  write_csv(ss, t);
  const auto cells = read_csv(ss);
  ASSERT_EQ(cells.size(), 3u);
  EXPECT_EQ(cells[1][0], "a,b");
  EXPECT_EQ(cells[2][0], "say \"hi\"");
  EXPECT_EQ(cells[2][1], "-3");
  EXPECT_THROW(t.add_row({1.0}), std::logic_error);
}

TEST(ParsePredict, ReadsSchemesAndDefaults) {
  const auto cfg = parse_predict_config(kPredictSix);
  EXPECT_EQ(cfg.c, 150.0);
  ASSERT_EQ(cfg.schemes.size(), 4u);
  EXPECT_EQ(cfg.schemes[1].kind, WeightKind::inverse_variance);
  EXPECT_EQ(cfg.normalization, Normalization::none);
  EXPECT_EQ(cfg.root_tol, 1e-12);
}

TEST(ParsePredict, EmptyAmplitudesNamesField) {
  try {
    parse_predict_config("c: 1\namplitudes: []\nnoise:\n  - {p: 1, sigma2: 1}\n", "x.yaml");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "amplitudes");
    EXPECT_NE(std::string(e.what()).find("amplitudes"), std::string::npos);
    EXPECT_EQ(e.line(), 2);
  }
}

TEST(ParsePredict, FieldLevelDiagnostics) {
  auto field_of = [](const std::string& text) {
    try {
      parse_predict_config(text);
    } catch (const ConfigError& e) {
      return e.field();
    }
    return std::string("<none>");
  };
  EXPECT_EQ(field_of("amplitudes: [1]\nnoise:\n  - {p: 1, sigma2: 1}\n"), "c");
  EXPECT_EQ(field_of("c: -1\namplitudes: [1]\nnoise:\n  - {p: 1, sigma2: 1}\n"), "c");
  EXPECT_EQ(field_of("c: 1\namplitudes: [1]\nnoise:\n  - {p: 1, sigma2: abc}\n"),
            "noise[0].sigma2");
  EXPECT_EQ(field_of("c: 1\namplitudes: [1]\nnoise:\n  - {p: 0.5, sigma2: 1}\n"), "noise");
  EXPECT_EQ(field_of("c: 1\namplitudes: [1]\nnoise:\n  - {p: 1, sigma2: 1}\ncolor: red\n"),
            "color");
  EXPECT_EQ(field_of("c: 1\namplitudes: [1]\nnoise:\n  - {p: 1, sigma2: 1}\nschemes: [best]\n"),
            "schemes[0]");
  EXPECT_EQ(field_of("c: 1\namplitudes: [1]\nnoise:\n  - {p: 1, sigma2: 1}\n"
                     "schemes:\n  - {kind: binary, mask: [1, 0]}\n"),
            "schemes[0].mask");
  EXPECT_EQ(field_of("c: [1\n"), "");
}

TEST(ParseSweep, ValidationAndOverrides) {
  const auto cfg = parse_sweep_config(kSweepSmall);
  EXPECT_EQ(cfg.spec.lambda_grid.size(), 11u);
  EXPECT_DOUBLE_EQ(cfg.spec.lambda_grid[3], 0.3);
  EXPECT_EQ(cfg.spec.base_seed, 5u);
  EXPECT_EQ(cfg.spec.spike.c(), 1.0);

  std::string zero = kSweepSmall;
  zero.replace(zero.find("trials: 3"), 9, "trials: 0");
  try {
    parse_sweep_config(zero);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "trials");
  }

  Overrides o;
  o.seed = 77;
  o.threads = 2;
  const auto over = parse_sweep_config(kSweepSmall, "<config>", o);
  EXPECT_EQ(over.spec.base_seed, 77u);
  EXPECT_EQ(over.spec.threads, 2u);

  Overrides large;
  large.paper_scale = true;
  const auto big = parse_sweep_config(kSweepSmall, "<config>", large);
  EXPECT_EQ(big.spec.trials, kPaperScaleTrials);
  EXPECT_EQ(big.spec.d, kPaperScaleDimension);
  EXPECT_EQ(big.spec.n, kPaperScaleDimension);
}

TEST(ParseSweep, ThreadsFromEnvironment) {
  ::setenv(kThreadsEnv, "3", 1);
  const auto env = parse_sweep_config(kSweepSmall);
  Overrides o;
  o.threads = 1;
  const auto flag = parse_sweep_config(kSweepSmall, "<config>", o);
  ::unsetenv(kThreadsEnv);
  EXPECT_EQ(env.spec.threads, 3u);
  EXPECT_EQ(flag.spec.threads, 1u);
}

TEST(ParseSamplePlan, Availability) {
  const auto cfg = parse_sample_plan_config(
      "theta2: 2\nbudget: 3\nsources:\n  - {sigma2: 1, cost: 1, availability: unbounded}\n"
      "  - {sigma2: 2, cost: 0, availability: 4}\n");
  EXPECT_FALSE(cfg.problem.sources()[0].availability.has_value());
  EXPECT_EQ(cfg.problem.sources()[1].availability, 4.0);
  EXPECT_THROW(parse_sample_plan_config("theta2: 2\nbudget: 3\nsources:\n"
                                        "  - {sigma2: 1, cost: 0}\n"),
               ConfigError);
}

TEST(ParseSimulate, LambdaOrWeights) {
  const std::string base = "d: 30\nn: 30\namplitudes: [4]\nnoise:\n"
                           "  - {p: 0.5, sigma2: 1}\n  - {p: 0.5, sigma2: 2}\n";
  const auto lam = parse_simulate_config(base + "lambda: 0.25\n");
  EXPECT_EQ(lam.lambda, 0.25);
  EXPECT_EQ(lam.group_weights, (std::vector<double>{1.5, 0.5}));
  const auto w = parse_simulate_config(base + "weights: [2, 1]\ntrial_index: 4\n");
  EXPECT_FALSE(w.lambda);
  EXPECT_EQ(w.trial_index, 4u);
  EXPECT_THROW(parse_simulate_config(base), ConfigError);
  EXPECT_THROW(parse_simulate_config(base + "lambda: 0.2\nweights: [1, 1]\n"), ConfigError);
  EXPECT_THROW(parse_simulate_config(base + "weights: [1]\n"), ConfigError);
}

TEST(CmdPredict, CleanNoisyLadder) {
  const auto table = cmd_predict(parse_predict_config(kPredictSix));
  ASSERT_EQ(table.rows.size(), 4u);
  const std::size_t ru = table.column("r_u");
  EXPECT_NEAR(number(table.rows[1][ru]), 0.88, 0.005);
  EXPECT_NEAR(number(table.rows[3][ru]), 0.91, 0.005);
  EXPECT_EQ(std::get<std::string>(table.rows[3][table.column("scheme")]), "optimal");
}

TEST(CmdPredict, CsvAndJsonCarryIdenticalNumbers) {
  const auto table = cmd_predict(parse_predict_config(kPredictSix));
  std::stringstream csv, json;
  write_csv(csv, table);
  write_json(json, table);
  const auto cells = read_csv(csv);
  const auto doc = nlohmann::json::parse(json.str());
  ASSERT_EQ(doc["rows"].size(), table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      const auto& cell = table.rows[r][c];
      if (const auto* d = std::get_if<double>(&cell)) {
        // CSV re-parse reproduces the in-memory value exactly.
        EXPECT_EQ(std::strtod(cells[r + 1][c].c_str(), nullptr), *d);
        EXPECT_EQ(doc["rows"][r][table.columns[c]].get<double>(), *d);
      }
    }
  }
}

TEST(CmdWeights, FormulaAndNormalization) {
  auto cfg = parse_weights_config(
      "theta2: 1\nnoise:\n  - {p: 0.1, sigma2: 1}\n  - {p: 0.9, sigma2: 5.75}\n");
  auto table = cmd_weights(cfg);
  const std::size_t opt = table.column("w2_optimal");
  EXPECT_DOUBLE_EQ(number(table.rows[0][opt]), 0.5);
  EXPECT_NEAR(number(table.rows[1][opt]), 0.02577, 1e-5);

  cfg.normalization = Normalization::unit_average;
  table = cmd_weights(cfg);
  for (const char* col : {"w2_uniform", "w2_inverse", "w2_square_inverse", "w2_optimal"}) {
    const std::size_t c = table.column(col);
    EXPECT_NEAR(0.1 * number(table.rows[0][c]) + 0.9 * number(table.rows[1][c]), 1.0, 1e-12);
  }

  const auto single = cmd_weights(parse_weights_config(
      "theta2: 3\nnoise:\n  - {p: 1, sigma2: 2}\nnormalization: unit_average\n"));
  for (std::size_t c = 3; c < 7; ++c) EXPECT_NEAR(number(single.rows[0][c]), 1.0, 1e-15);
}

TEST(CmdSamplePlan, TwoSourceBudgetAndVertexTable) {
  const auto cfg = parse_sample_plan_config(read_text_file(config_path("sample_plan_two_sources.yaml")));
  const auto table = cmd_sample_plan(cfg);
  EXPECT_EQ(std::get<std::string>(table.rows[0][0]), "optimum");
  EXPECT_DOUBLE_EQ(number(table.rows[0][table.column("c_1")]), 2.0);
  EXPECT_DOUBLE_EQ(number(table.rows[0][table.column("c_2")]), 0.625);
  EXPECT_NEAR(number(table.rows[0][table.column("recovery")]), 0.93, 0.005);
  EXPECT_EQ(table.rows.size(), 1 + enumerate_vertices(cfg.problem).size());
}

TEST(CmdSamplePlan, EmptyBudget) {
  const auto table = cmd_sample_plan(parse_sample_plan_config(
      "theta2: 2\nbudget: 0\nsources:\n  - {sigma2: 1, cost: 1, availability: 2}\n"
      "  - {sigma2: 3, cost: 2}\n"));
  EXPECT_EQ(number(table.rows[0][table.column("c_1")]), 0.0);
  EXPECT_EQ(number(table.rows[0][table.column("c_2")]), 0.0);
  EXPECT_EQ(number(table.rows[0][table.column("recovery")]), 0.0);
}

TEST(CmdSweep, RowCountAndColumns) {
  const auto table = cmd_sweep(parse_sweep_config(kSweepSmall));
  // Per lambda: one mse row and five metrics for each of two components.
  EXPECT_EQ(table.rows.size(), 11u * (1 + 2 * 5));
  EXPECT_EQ(table.columns, (std::vector<std::string>{"lambda", "component_index", "metric",
                                                     "mean", "q25", "q75", "prediction", "n",
                                                     "d", "trials"}));
  EXPECT_EQ(table.metadata.front(), (std::pair<std::string, std::string>{"quantiles", "linear"}));
}

TEST(CmdSimulate, LongFormat) {
  const auto table = cmd_simulate(parse_simulate_config(
      "d: 40\nn: 40\nseed: 3\namplitudes: [25, 16]\nnoise:\n  - {p: 0.2, sigma2: 1}\n"
      "  - {p: 0.8, sigma2: 4}\nlambda: 0.5\n"));
  EXPECT_EQ(table.rows.size(), 1u + 2 * 5);
  EXPECT_EQ(table.columns.front(), "component_index");
}

TEST(Run, ExitCodesAndOutput) {
  std::string out, err;
  EXPECT_EQ(run_args({"predict", "--config", config_path("predict_two_groups.yaml")}, &out, &err),
            kExitOk);
  EXPECT_EQ(out.substr(0, 6), "theta2");

  const std::string bad = temp_file("bad.yaml", "c: 1\namplitudes: []\nnoise:\n  - {p: 1, sigma2: 1}\n");
  EXPECT_EQ(run_args({"predict", "--config", bad}, &out, &err), kExitConfigError);
  EXPECT_NE(err.find("amplitudes"), std::string::npos);

  EXPECT_NE(run_args({"predict"}, &out, &err), kExitOk);
  EXPECT_NE(run_args({"frobnicate"}, &out, &err), kExitOk);
  EXPECT_NE(run_args({"predict", "--config", "/nonexistent/file.yaml"}, &out, &err), kExitOk);
  EXPECT_NE(run_args({"predict", "--config", config_path("predict_two_groups.yaml"), "--format", "xml"},
                     &out, &err),
            kExitOk);
}

TEST(Run, JsonFormatAndOutFile) {
  const fs::path out_path = fs::temp_directory_path() / "wpca_cli_test_out.json";
  fs::remove(out_path);
  EXPECT_EQ(run_args({"weights", "--config", config_path("weights_two_groups.yaml"), "--out",
                      out_path.string()}),
            kExitOk);
  std::ifstream in(out_path);
  const auto doc = nlohmann::json::parse(in);
  EXPECT_EQ(doc["rows"].size(), 2u);
  EXPECT_DOUBLE_EQ(doc["rows"][0]["w2_optimal"].get<double>(), 0.5);
}

TEST(Run, SweepIsByteIdenticalAcrossRunsAndThreads) {
  const std::string cfg = temp_file("sweep.yaml", kSweepSmall);
  std::string a, b, c;
  ASSERT_EQ(run_args({"sweep", "--config", cfg}, &a), kExitOk);
  ASSERT_EQ(run_args({"sweep", "--config", cfg}, &b), kExitOk);
  ASSERT_EQ(run_args({"sweep", "--config", cfg, "--threads", "3"}, &c), kExitOk);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, c);
  std::string d;
  ASSERT_EQ(run_args({"sweep", "--config", cfg, "--seed", "6"}, &d), kExitOk);
  EXPECT_NE(a, d);
}

TEST(Run, ShippedConfigsParse) {
  EXPECT_NO_THROW(parse_predict_config(read_text_file(config_path("predict_two_groups.yaml"))));
  EXPECT_NO_THROW(parse_weights_config(read_text_file(config_path("weights_two_groups.yaml"))));
  EXPECT_NO_THROW(parse_sweep_config(read_text_file(config_path("sweep_desk.yaml"))));
  EXPECT_NO_THROW(parse_simulate_config(read_text_file(config_path("simulate_uniform.yaml"))));
}

}  // namespace
}  // namespace wpca::cli
