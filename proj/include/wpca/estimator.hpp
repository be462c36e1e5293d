#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "wpca/model.hpp"

namespace wpca {

/// Per-sample weight values omega_j^2 (the diagonal of W^2). All entries are
/// nonnegative and at least one is positive.
class SampleWeights {
 public:
  explicit SampleWeights(std::vector<double> values);

  static SampleWeights uniform(std::size_t n);

  /// Expands per-group weights w_l^2 to samples through their group labels.
  static SampleWeights from_groups(std::span<const std::size_t> labels,
                                   std::span<const double> per_group);

  std::span<const double> values() const { return values_; }
  double operator[](std::size_t j) const { return values_[j]; }
  std::size_t size() const { return values_.size(); }

  /// View as an Eigen vector of omega_j^2.
  Eigen::Map<const Eigen::VectorXd> vector() const {
    return {values_.data(), static_cast<Eigen::Index>(values_.size())};
  }

 private:
  std::vector<double> values_;
};

enum class SvdMethod { automatic, dense, lanczos };

struct FitOptions {
  SvdMethod method = SvdMethod::automatic;
  /// Residual tolerance for the Lanczos path, relative to the top eigenvalue.
  double lanczos_tol = 1e-12;
};

/// Result of weighted PCA on a d x n data matrix.
///
/// components^T components = I, (1/n) Z^T diag(omega^2) Z = I for the
/// scores, amplitudes are the top eigenvalues of the weighted covariance in
/// nonincreasing order. When the weighted data has rank below the requested
/// k, only the achievable columns are returned and rank_deficient is set.
struct WpcaFit {
  Eigen::MatrixXd components;  ///< d x k, u_hat_i
  Eigen::VectorXd amplitudes;  ///< theta_hat_i^2
  Eigen::MatrixXd scores;      ///< n x k, z_hat_i
  SampleWeights weights_used;
  std::size_t requested_k = 0;
  bool rank_deficient = false;

  std::size_t k() const { return static_cast<std::size_t>(amplitudes.size()); }
};

/// Weighted PCA: the truncated generalized SVD of Y.
///
/// With W = diag(sqrt(omega_j^2)), the components and amplitudes come from
/// the top-k left singular vectors and squared singular values of
/// Y W / sqrt(n); scores are z_hat_i = Y^T u_hat_i / theta_hat_i. Each
/// component is flipped so that its largest-magnitude entry is positive.
WpcaFit fit_wpca(const Eigen::MatrixXd& y, const SampleWeights& weights,
                 std::size_t k, const FitOptions& options = {});

/// Columns x_hat_j = sum_i u_hat_i theta_hat_i z_hat_i(j).
Eigen::MatrixXd reconstruct(const WpcaFit& fit);

/// sum_j omega_j^2 ||y_j - x_hat_j||^2
double weighted_objective(const Eigen::MatrixXd& y, const WpcaFit& fit);

/// Recovery split between truth components sharing the estimated
/// component's amplitude (matched) and all others (mismatched).
struct RecoveryPair {
  double matched = 0.0;
  double mismatched = 0.0;
};

/// sum over j of <u_hat_i, u_j>^2, split by amplitude equality theta_j == theta_i.
RecoveryPair empirical_component_recovery(const WpcaFit& fit,
                                          const SyntheticDataset& truth,
                                          const SpikeModel& spike,
                                          std::size_t i);

/// Same split for the weighted score inner products
/// <z_hat_i / sqrt(n), z_j / sqrt(n)>_{W^2}, using the fit's weights.
RecoveryPair empirical_score_recovery(const WpcaFit& fit,
                                      const SyntheticDataset& truth,
                                      const SpikeModel& spike, std::size_t i);

/// Matched sum of squared unweighted score inner products
/// <z_hat_i / sqrt(n), z_j / sqrt(n)>. No asymptotic counterpart exists.
double empirical_unweighted_score_recovery(const WpcaFit& fit,
                                           const SyntheticDataset& truth,
                                           const SpikeModel& spike,
                                           std::size_t i);

/// sum_{j: theta_j == theta_i} <u_hat_i, u_j> <z_hat_i/sqrt(n), z_j/sqrt(n)>_{W^2}
double empirical_cross_product(const WpcaFit& fit,
                               const SyntheticDataset& truth,
                               const SpikeModel& spike, std::size_t i);

/// (1/n) sum_j omega_j^2 ||x_hat_j - x_j||^2
double empirical_weighted_mse(const WpcaFit& fit,
                              const SyntheticDataset& truth);

}  // namespace wpca
