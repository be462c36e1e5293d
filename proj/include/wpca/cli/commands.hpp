#pragma once

#include <iosfwd>

#include "wpca/cli/config.hpp"
#include "wpca/cli/table.hpp"

namespace wpca::cli {

/// One row per (amplitude, scheme): theta2, scheme, alpha, beta, r_theta,
/// r_u, r_z, cross, above_transition, truncated.
Table cmd_predict(const PredictConfig& config);

/// One row per noise group: group, p, sigma2 and the four standard weight
/// columns under the configured normalization.
Table cmd_weights(const WeightsConfig& config);

/// The optimum row first (kind "optimum"), then every vertex of the budget
/// polyhedron (kind "vertex") with its recovery.
Table cmd_sample_plan(const SamplePlanConfig& config);

/// lambda, component_index, metric, mean, q25, q75, prediction, n, d, trials.
Table cmd_sweep(const SweepConfig& config);

/// A single trial in long format: component_index, metric, value,
/// prediction, seed, lambda.
Table cmd_simulate(const SimulateConfig& config);

/// Exit codes of run().
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntimeError = 1;
inline constexpr int kExitConfigError = 2;

/// Command-line entry point. Writes the table to --out (or `out`) and
/// diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace wpca::cli
