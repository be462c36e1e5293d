#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wpca/montecarlo.hpp"
#include "wpca/sampling.hpp"
#include "wpca/weighting.hpp"

namespace wpca::cli {

/// A configuration problem tied to a field path such as "noise[1].sigma2".
/// what() reads "<source>:<line>:<column>: <field>: <message>" when the
/// location is known.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message,
              std::string_view source = {}, int line = -1, int column = -1);

  const std::string& field() const { return field_; }
  int line() const { return line_; }

 private:
  std::string field_;
  int line_;
};

/// A weight scheme requested in a predict config. `values` holds the mask
/// for binary schemes and the weights for custom ones.
struct SchemeChoice {
  WeightKind kind = WeightKind::uniform;
  std::vector<double> values;
  std::string label;
};

struct PredictConfig {
  double c = 1.0;
  std::vector<double> amplitudes;
  NoiseProfile noise;
  std::vector<SchemeChoice> schemes;
  Normalization normalization = Normalization::none;
  double root_tol = kDefaultRootTol;
};

struct WeightsConfig {
  double theta2 = 1.0;
  NoiseProfile noise;
  Normalization normalization = Normalization::none;
};

struct SamplePlanConfig {
  BudgetProblem problem;
};

struct SweepConfig {
  SweepSpec spec;
};

/// One simulated trial at a lambda value or with explicit group weights.
struct SimulateConfig {
  SweepSpec spec;
  std::vector<double> group_weights;
  std::optional<double> lambda;
  std::size_t trial_index = 0;
};

/// Command-line overrides applied after parsing.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  bool paper_scale = false;
};

/// Trials and size used by --paper-scale.
inline constexpr std::size_t kPaperScaleTrials = 500;
inline constexpr std::size_t kPaperScaleDimension = 10000;

/// Environment variable holding the default worker thread count.
inline constexpr const char* kThreadsEnv = "WPCA_THREADS";

PredictConfig parse_predict_config(std::string_view text,
                                   std::string_view source = "<config>");
WeightsConfig parse_weights_config(std::string_view text,
                                   std::string_view source = "<config>");
SamplePlanConfig parse_sample_plan_config(std::string_view text,
                                          std::string_view source = "<config>");
SweepConfig parse_sweep_config(std::string_view text,
                               std::string_view source = "<config>",
                               const Overrides& overrides = {});
SimulateConfig parse_simulate_config(std::string_view text,
                                     std::string_view source = "<config>",
                                     const Overrides& overrides = {});

std::string read_text_file(const std::string& path);

}  // namespace wpca::cli
