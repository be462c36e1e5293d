#include "wpca/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "wpca/linalg.hpp"

namespace wpca {

namespace {

using Eigen::Index;

// Eigenvalues below this fraction of the largest are treated as zero rank.
constexpr double kRankCutoff = 1e-12;

// Below this many effective samples or dimensions the dense SVD is used.
constexpr Index kDenseLimit = 200;

void check_index(const WpcaFit& fit, const SyntheticDataset& truth,
                 const SpikeModel& spike, std::size_t i) {
  if (i >= fit.k()) {
    throw std::out_of_range("component index " + std::to_string(i) +
                            " out of range for a fit with " +
                            std::to_string(fit.k()) + " components");
  }
  if (fit.components.rows() != static_cast<Index>(truth.d) ||
      fit.scores.rows() != static_cast<Index>(truth.n)) {
    throw std::invalid_argument("fit and dataset dimensions differ");
  }
  if (spike.k() != truth.k()) {
    throw std::invalid_argument("spike model and dataset disagree on k");
  }
}

// Weighted inner products <z_hat_i/sqrt(n), z_j/sqrt(n)>_{W^2} for all j.
Eigen::VectorXd weighted_score_products(const WpcaFit& fit,
                                        const SyntheticDataset& truth,
                                        std::size_t i) {
  const double n = static_cast<double>(truth.n);
  const Eigen::VectorXd weighted =
      fit.scores.col(static_cast<Index>(i)).cwiseProduct(fit.weights_used.vector());
  return truth.scores.transpose() * weighted / n;
}

RecoveryPair split_squares(const Eigen::VectorXd& products,
                           const SpikeModel& spike, std::size_t i) {
  RecoveryPair out;
  const double ai = spike.amplitude(i);
  for (std::size_t j = 0; j < spike.k(); ++j) {
    const double sq = products(static_cast<Index>(j)) * products(static_cast<Index>(j));
    if (spike.amplitude(j) == ai) {
      out.matched += sq;
    } else {
      out.mismatched += sq;
    }
  }
  return out;
}

}  // namespace

SampleWeights::SampleWeights(std::vector<double> values)
    : values_(std::move(values)) {
  bool any_positive = false;
  for (double v : values_) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("sample weights must be finite and nonnegative");
    }
    any_positive = any_positive || v > 0.0;
  }
  if (!any_positive) {
    throw std::invalid_argument("sample weights are all zero");
  }
}

SampleWeights SampleWeights::uniform(std::size_t n) {
  return SampleWeights(std::vector<double>(n, 1.0));
}

SampleWeights SampleWeights::from_groups(std::span<const std::size_t> labels,
                                         std::span<const double> per_group) {
  std::vector<double> values;
  values.reserve(labels.size());
  for (std::size_t label : labels) {
    if (label >= per_group.size()) {
      throw std::invalid_argument("sample label has no group weight");
    }
    values.push_back(per_group[label]);
  }
  return SampleWeights(std::move(values));
}

WpcaFit fit_wpca(const Eigen::MatrixXd& y, const SampleWeights& weights,
                 std::size_t k, const FitOptions& options) {
  const Index d = y.rows();
  const Index n = y.cols();
  if (static_cast<Index>(weights.size()) != n) {
    throw std::invalid_argument("weights length does not match sample count");
  }
  if (k == 0 || static_cast<Index>(k) > std::min(d, n)) {
    throw std::invalid_argument("k must lie in [1, min(d, n)]");
  }

  // Y W / sqrt(n), keeping only samples with positive weight.
  std::vector<Index> active;
  for (Index j = 0; j < n; ++j) {
    if (weights[static_cast<std::size_t>(j)] > 0.0) active.push_back(j);
  }
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
  Eigen::MatrixXd scaled(d, static_cast<Index>(active.size()));
  for (std::size_t a = 0; a < active.size(); ++a) {
    const Index j = active[a];
    scaled.col(static_cast<Index>(a)) =
        y.col(j) * (std::sqrt(weights[static_cast<std::size_t>(j)]) * inv_sqrt_n);
  }

  SvdMethod method = options.method;
  if (method == SvdMethod::automatic) {
    const Index small = std::min(d, scaled.cols());
    method = (small <= kDenseLimit || static_cast<Index>(4 * k) > small)
                 ? SvdMethod::dense
                 : SvdMethod::lanczos;
  }
  const linalg::Eigenpairs eig =
      method == SvdMethod::dense
          ? linalg::top_gram_eigenpairs_dense(scaled, k)
          : linalg::top_gram_eigenpairs_lanczos(scaled, k, options.lanczos_tol);

  Index rank = 0;
  const double top = eig.values.size() > 0 ? eig.values(0) : 0.0;
  while (rank < eig.values.size() && eig.values(rank) > 0.0 &&
         eig.values(rank) > kRankCutoff * top) {
    ++rank;
  }

  WpcaFit fit{Eigen::MatrixXd(d, rank), Eigen::VectorXd(rank),
              Eigen::MatrixXd(n, rank), weights, k,
              rank < static_cast<Index>(k)};
  for (Index i = 0; i < rank; ++i) {
    fit.amplitudes(i) = eig.values(i);
    fit.components.col(i) = eig.vectors.col(i);
    linalg::canonicalize_sign(fit.components.col(i));
  }
  if (rank > 0) {
    const Eigen::VectorXd inv_theta = fit.amplitudes.cwiseSqrt().cwiseInverse();
    fit.scores.noalias() = y.transpose() * fit.components;
    fit.scores = fit.scores * inv_theta.asDiagonal();
  }
  return fit;
}

Eigen::MatrixXd reconstruct(const WpcaFit& fit) {
  const Eigen::VectorXd theta = fit.amplitudes.cwiseSqrt();
  return fit.components * theta.asDiagonal() * fit.scores.transpose();
}

double weighted_objective(const Eigen::MatrixXd& y, const WpcaFit& fit) {
  if (y.rows() != fit.components.rows() || y.cols() != fit.scores.rows() ||
      static_cast<std::size_t>(y.cols()) != fit.weights_used.size()) {
    throw std::invalid_argument("data and fit dimensions differ");
  }
  const Eigen::MatrixXd residual = y - reconstruct(fit);
  return residual.colwise().squaredNorm().dot(fit.weights_used.vector());
}

RecoveryPair empirical_component_recovery(const WpcaFit& fit,
                                          const SyntheticDataset& truth,
                                          const SpikeModel& spike,
                                          std::size_t i) {
  check_index(fit, truth, spike, i);
  const Eigen::VectorXd products =
      truth.components.transpose() * fit.components.col(static_cast<Index>(i));
  return split_squares(products, spike, i);
}

RecoveryPair empirical_score_recovery(const WpcaFit& fit,
                                      const SyntheticDataset& truth,
                                      const SpikeModel& spike, std::size_t i) {
  check_index(fit, truth, spike, i);
  return split_squares(weighted_score_products(fit, truth, i), spike, i);
}

double empirical_unweighted_score_recovery(const WpcaFit& fit,
                                           const SyntheticDataset& truth,
                                           const SpikeModel& spike,
                                           std::size_t i) {
  check_index(fit, truth, spike, i);
  const Eigen::VectorXd products =
      truth.scores.transpose() * fit.scores.col(static_cast<Index>(i)) /
      static_cast<double>(truth.n);
  return split_squares(products, spike, i).matched;
}

double empirical_cross_product(const WpcaFit& fit,
                               const SyntheticDataset& truth,
                               const SpikeModel& spike, std::size_t i) {
  check_index(fit, truth, spike, i);
  const Eigen::VectorXd comp =
      truth.components.transpose() * fit.components.col(static_cast<Index>(i));
  const Eigen::VectorXd score = weighted_score_products(fit, truth, i);
  double sum = 0.0;
  for (std::size_t j = 0; j < spike.k(); ++j) {
    if (spike.amplitude(j) == spike.amplitude(i)) {
      sum += comp(static_cast<Index>(j)) * score(static_cast<Index>(j));
    }
  }
  return sum;
}

double empirical_weighted_mse(const WpcaFit& fit,
                              const SyntheticDataset& truth) {
  if (fit.components.rows() != static_cast<Index>(truth.d) ||
      fit.scores.rows() != static_cast<Index>(truth.n)) {
    throw std::invalid_argument("fit and dataset dimensions differ");
  }
  const Eigen::MatrixXd diff = reconstruct(fit) - truth.signal();
  return diff.colwise().squaredNorm().dot(fit.weights_used.vector()) /
         static_cast<double>(truth.n);
}

}  // namespace wpca
