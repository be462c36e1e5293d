#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace wpca {

/// One noise level: a fraction p of the samples carries variance sigma^2.
struct NoiseGroup {
  double proportion = 0.0;
  double variance = 0.0;
};

/// Heteroscedastic noise description: groups (p_l, sigma_l^2), l = 1..L.
///
/// Proportions sum to one (within 1e-12), variances are nonnegative and
/// pairwise distinct. At least one variance must be positive unless the
/// noiseless case is requested explicitly.
class NoiseProfile {
 public:
  enum class ZeroNoise { reject, allow };

  explicit NoiseProfile(std::vector<NoiseGroup> groups,
                        ZeroNoise zero_noise = ZeroNoise::reject);

  /// Builds a profile after merging groups that share a variance (their
  /// proportions are summed, first-occurrence order is kept).
  static NoiseProfile merged(std::vector<NoiseGroup> groups,
                             ZeroNoise zero_noise = ZeroNoise::reject);

  std::span<const NoiseGroup> groups() const { return groups_; }
  std::size_t size() const { return groups_.size(); }
  double proportion(std::size_t l) const { return groups_.at(l).proportion; }
  double variance(std::size_t l) const { return groups_.at(l).variance; }
  std::vector<double> proportions() const;
  std::vector<double> variances() const;

  /// sum_l p_l sigma_l^2
  double average_variance() const;

  /// (sum_l p_l / sigma_l^2)^-1, the reciprocal of the average inverse
  /// variance. Throws if a group with p_l > 0 is noiseless.
  double harmonic_variance() const;

  /// Deterministic group sizes: n_l = round(p_l n) for l < L, and the last
  /// group absorbs the residue. Throws if the residue would be negative.
  std::vector<std::size_t> group_counts(std::size_t n) const;

 private:
  std::vector<NoiseGroup> groups_;
};

/// Sample-to-dimension ratio c and planted amplitudes theta_i^2, stored in
/// nonincreasing order.
class SpikeModel {
 public:
  SpikeModel(double c, std::vector<double> amplitudes);

  double c() const { return c_; }
  std::span<const double> amplitudes() const { return amplitudes_; }
  double amplitude(std::size_t i) const { return amplitudes_.at(i); }
  std::size_t k() const { return amplitudes_.size(); }

 private:
  double c_;
  std::vector<double> amplitudes_;
};

enum class ScoreDistribution { gaussian, rademacher };

/// Data drawn from the heteroscedastic spiked model, with its ground truth.
struct SyntheticDataset {
  Eigen::MatrixXd data;        ///< d x n, samples as columns
  Eigen::MatrixXd components;  ///< d x k orthonormal U
  Eigen::MatrixXd scores;      ///< n x k, Z
  Eigen::VectorXd amplitudes;  ///< theta_i^2, length k
  std::vector<std::size_t> noise_labels;  ///< group index per sample
  std::vector<double> noise_std;          ///< eta_j per sample
  std::size_t d = 0;
  std::size_t n = 0;
  std::uint64_t seed = 0;

  std::size_t k() const { return static_cast<std::size_t>(amplitudes.size()); }

  /// Noise-free part X = U diag(theta) Z^T.
  Eigen::MatrixXd signal() const;
};

/// Draws Y = U Theta Z^T + E H.
///
/// U orthonormalizes a d x k standard Gaussian matrix, Z has iid entries
/// from score_dist (zero mean, unit variance), E is iid standard normal and
/// H = diag(eta_j) with eta_j = sigma_l for the group of sample j. Groups are
/// assigned blockwise in column order. The result is a pure function of the
/// arguments: the same seed reproduces Y bit for bit.
SyntheticDataset generate_dataset(const SpikeModel& spike,
                                  const NoiseProfile& noise, std::size_t d,
                                  std::size_t n, ScoreDistribution score_dist,
                                  std::uint64_t seed);

}  // namespace wpca
