#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "wpca/model.hpp"

namespace wpca {

inline constexpr double kDefaultRootTol = 1e-12;

/// Parameters of the large-sample limit: sample ratio c, the noise profile
/// and per-group weights w_l^2.
///
/// At least one group must have both p_l > 0 and w_l^2 > 0. Groups where
/// either is zero are inactive: they contribute nothing to A, B_i or C and
/// are excluded from the pole set.
class AsymptoticConfig {
 public:
  AsymptoticConfig(double c, NoiseProfile noise, std::vector<double> weights,
                   double root_tol = kDefaultRootTol);

  double c() const { return c_; }
  const NoiseProfile& noise() const { return noise_; }
  std::span<const double> weights() const { return weights_; }
  double root_tol() const { return root_tol_; }

  bool active(std::size_t l) const;

  /// max over active groups of w_l^2 sigma_l^2.
  double pole_max() const { return pole_max_; }

  /// sum_l p_l w_l^2
  double average_weight() const;

  /// Same configuration with every weight multiplied by factor.
  AsymptoticConfig scaled(double factor) const;

 private:
  double c_;
  NoiseProfile noise_;
  std::vector<double> weights_;
  double root_tol_;
  double pole_max_ = 0.0;
};

/// A(x) = 1 - c sum_l p_l w_l^4 sigma_l^4 / (x - w_l^2 sigma_l^2)^2
double eval_A(double x, const AsymptoticConfig& cfg);
/// B_i(x) = 1 - c theta_i^2 sum_l p_l w_l^2 / (x - w_l^2 sigma_l^2)
double eval_B(double x, const AsymptoticConfig& cfg, double theta2);
/// C(x) = 1 + c sum_l p_l w_l^2 sigma_l^2 / (x - w_l^2 sigma_l^2)
double eval_C(double x, const AsymptoticConfig& cfg);
/// A'(x) = 2 c sum_l p_l w_l^4 sigma_l^4 / (x - w_l^2 sigma_l^2)^3
double eval_A_prime(double x, const AsymptoticConfig& cfg);
/// B_i'(x) = c theta_i^2 sum_l p_l w_l^2 / (x - w_l^2 sigma_l^2)^2
double eval_B_prime(double x, const AsymptoticConfig& cfg, double theta2);

/// alpha: the unique root of A above pole_max. When every active group is
/// noiseless A is identically one and alpha is taken as pole_max.
double largest_root_A(const AsymptoticConfig& cfg);

/// beta_i: the unique root of B_i above pole_max.
double largest_root_B(const AsymptoticConfig& cfg, double theta2);

struct RecoveryPrediction {
  double amplitude_limit = 0.0;     ///< theta_hat_i^2 limit
  double component_recovery = 0.0;  ///< r_u
  double score_recovery = 0.0;      ///< r_z (weighted)
  double cross_product = 0.0;       ///< sqrt(r_u r_z)
  double alpha = 0.0;
  double beta = 0.0;
  bool above_transition = false;    ///< A(beta_i) > 0
  bool truncated = false;           ///< recoveries set to zero below the transition
};

/// Limits of the WPCA amplitude, component recovery, weighted score
/// recovery and their cross product for amplitude theta2.
///
/// Below the phase transition (A(beta_i) <= 0) the recoveries are truncated
/// to zero and `truncated` is set: that branch is conjectural.
RecoveryPrediction predict(const AsymptoticConfig& cfg, double theta2);

/// Closed forms for weights w_l^2 = sigma_bar^2 / sigma_l^2, where
/// sigma_bar^-2 = sum_l p_l / sigma_l^2. The boundary c theta^4 == sigma_bar^4
/// falls on the below-transition branch.
RecoveryPrediction predict_inverse_variance(double c, const NoiseProfile& noise,
                                            double theta2);

struct AggregatePrediction {
  double subspace_recovery = 0.0;        ///< sum_i r_u_i
  double aggregate_score_recovery = 0.0; ///< sum_i r_z_i
  double weighted_mse = 0.0;
  bool truncated = false;                ///< some term lies below the transition
};

/// Subspace, aggregate score and weighted-MSE limits for all amplitudes of
/// spike. Terms below the transition use zero recovery and the amplitude
/// limit (1/c) alpha C(alpha). spike.c() must equal cfg.c().
AggregatePrediction aggregate_prediction(const AsymptoticConfig& cfg,
                                         const SpikeModel& spike);

}  // namespace wpca
