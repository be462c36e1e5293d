#include <cmath>

#include <gtest/gtest.h>

#include "wpca/model.hpp"

namespace wpca {
namespace {

NoiseProfile two_groups(double p1, double s1, double s2) {
  return NoiseProfile({{p1, s1}, {1.0 - p1, s2}});
}

TEST(NoiseProfile, ValidatesInvariants) {
  EXPECT_THROW(NoiseProfile({}), std::invalid_argument);
  EXPECT_THROW(NoiseProfile({{0.5, 1.0}, {0.4, 2.0}}), std::invalid_argument);
  EXPECT_THROW(NoiseProfile({{1.2, 1.0}, {-0.2, 2.0}}), std::invalid_argument);
  EXPECT_THROW(NoiseProfile({{0.5, -1.0}, {0.5, 2.0}}), std::invalid_argument);
  EXPECT_THROW(NoiseProfile({{0.5, 1.0}, {0.5, 1.0}}), std::invalid_argument);
  EXPECT_THROW(NoiseProfile({{1.0, 0.0}}), std::invalid_argument);
  EXPECT_NO_THROW(NoiseProfile({{1.0, 0.0}}, NoiseProfile::ZeroNoise::allow));
  EXPECT_NO_THROW(NoiseProfile({{0.3, 1.0}, {0.7 + 5e-13, 2.0}}));
}

TEST(NoiseProfile, MergesDuplicateVariances) {
  const auto merged = NoiseProfile::merged({{0.2, 1.0}, {0.5, 4.0}, {0.3, 1.0}});
  ASSERT_EQ(merged.size(), 2u);
  EXPECT_DOUBLE_EQ(merged.proportion(0), 0.5);
  EXPECT_DOUBLE_EQ(merged.variance(1), 4.0);
}

TEST(NoiseProfile, Averages) {
  const auto noise = two_groups(0.5, 1.0, 3.0);
  EXPECT_DOUBLE_EQ(noise.average_variance(), 2.0);
  EXPECT_DOUBLE_EQ(noise.harmonic_variance(), 1.5);
}

TEST(NoiseProfile, GroupCountsRoundDeterministically) {
  const NoiseProfile noise({{1.0 / 3.0, 1.0}, {1.0 / 3.0, 2.0}, {1.0 / 3.0, 3.0}});
  for (std::size_t n : {1u, 2u, 7u, 10u, 100u, 1001u}) {
    const auto counts = noise.group_counts(n);
    std::size_t total = 0;
    for (std::size_t l = 0; l < counts.size(); ++l) {
      total += counts[l];
      EXPECT_LE(std::abs(static_cast<double>(counts[l]) / n - noise.proportion(l)),
                1.0 / n + 1e-15);
    }
    EXPECT_EQ(total, n);
  }
}

TEST(SpikeModel, SortsAndValidates) {
  const SpikeModel s(1.0, {16.0, 25.0, 16.0});
  EXPECT_DOUBLE_EQ(s.amplitude(0), 25.0);
  EXPECT_DOUBLE_EQ(s.amplitude(1), 16.0);
  EXPECT_DOUBLE_EQ(s.amplitude(2), 16.0);
  EXPECT_THROW(SpikeModel(0.0, {1.0}), std::invalid_argument);
  EXPECT_THROW(SpikeModel(1.0, {}), std::invalid_argument);
  EXPECT_THROW(SpikeModel(1.0, {1.0, -1.0}), std::invalid_argument);
}

TEST(GenerateDataset, NoiselessRankOneEqualsOuterProduct) {
  const NoiseProfile noise({{1.0, 0.0}}, NoiseProfile::ZeroNoise::allow);
  const auto ds = generate_dataset(SpikeModel(1.0, {1.0}), noise, 4, 4,
                                   ScoreDistribution::gaussian, 5);
  const Eigen::MatrixXd outer = ds.components.col(0) * ds.scores.col(0).transpose();
  EXPECT_EQ((ds.data - outer).cwiseAbs().maxCoeff(), 0.0);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(ds.data);
  EXPECT_LT(svd.singularValues()(1), 1e-12 * svd.singularValues()(0));
}

TEST(GenerateDataset, NoiselessRankIsK) {
  const NoiseProfile noise({{1.0, 0.0}}, NoiseProfile::ZeroNoise::allow);
  const auto ds = generate_dataset(SpikeModel(2.0, {9.0, 4.0, 1.0}), noise, 20, 40,
                                   ScoreDistribution::gaussian, 3);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(ds.data);
  const auto& sv = svd.singularValues();
  EXPECT_GT(sv(2), 1e-8 * sv(0));
  EXPECT_LT(sv(3), 1e-8 * sv(0));
}

TEST(GenerateDataset, DeterministicAndSeedSensitive) {
  const auto noise = two_groups(0.2, 1.0, 4.0);
  const SpikeModel spike(1.0, {25.0, 16.0});
  const auto a = generate_dataset(spike, noise, 30, 30, ScoreDistribution::gaussian, 42);
  const auto b = generate_dataset(spike, noise, 30, 30, ScoreDistribution::gaussian, 42);
  const auto c = generate_dataset(spike, noise, 30, 30, ScoreDistribution::gaussian, 43);
  EXPECT_TRUE(a.data == b.data);
  EXPECT_FALSE(a.data == c.data);
}

TEST(GenerateDataset, StructureOfGroundTruth) {
  const auto noise = two_groups(0.3, 1.0, 4.0);
  const auto ds = generate_dataset(SpikeModel(0.5, {25.0, 16.0}), noise, 80, 40,
                                   ScoreDistribution::rademacher, 9);
  const Eigen::MatrixXd gram = ds.components.transpose() * ds.components;
  EXPECT_LT((gram - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_EQ(ds.scores.cwiseAbs().minCoeff(), 1.0);
  EXPECT_EQ(ds.scores.cwiseAbs().maxCoeff(), 1.0);
  // Blockwise labels: first round(0.3 * 40) = 12 samples are group 0.
  for (std::size_t j = 0; j < 40; ++j) {
    EXPECT_EQ(ds.noise_labels[j], j < 12 ? 0u : 1u);
    EXPECT_DOUBLE_EQ(ds.noise_std[j], j < 12 ? 1.0 : 2.0);
  }
}

TEST(GenerateDataset, RejectsBadSizes) {
  const auto noise = two_groups(0.5, 1.0, 2.0);
  const SpikeModel spike(1.0, {4.0, 1.0});
  EXPECT_THROW(generate_dataset(spike, noise, 1, 5, ScoreDistribution::gaussian, 0),
               std::invalid_argument);
  EXPECT_THROW(generate_dataset(spike, noise, 5, 1, ScoreDistribution::gaussian, 0),
               std::invalid_argument);
}

TEST(GenerateDataset, SampleCovarianceMatchesPopulation) {
  // Population covariance is theta^2 u u^T + (sum_l p_l sigma_l^2) I.
  const auto noise = two_groups(0.5, 1.0, 4.0);
  const auto ds = generate_dataset(SpikeModel(25000.0, {1.0}), noise, 4, 100000,
                                   ScoreDistribution::gaussian, 2024);
  const Eigen::MatrixXd sample = ds.data * ds.data.transpose() / 1e5;
  const Eigen::MatrixXd pop = ds.components * ds.components.transpose() +
                              2.5 * Eigen::MatrixXd::Identity(4, 4);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sample - pop);
  EXPECT_LT(es.eigenvalues().cwiseAbs().maxCoeff(), 0.05);
}

TEST(GenerateDataset, ColumnEnergyPerGroup) {
  // E ||y_j||^2 = sum_i theta_i^2 + d sigma_l^2, checked in a 3-sigma band.
  const auto noise = two_groups(0.4, 1.0, 4.0);
  const std::size_t d = 50, n = 4000;
  const std::vector<double> theta2{9.0, 4.0};
  const auto ds = generate_dataset(SpikeModel(80.0, theta2), noise, d, n,
                                   ScoreDistribution::gaussian, 77);
  for (std::size_t l = 0; l < 2; ++l) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (ds.noise_labels[j] != l) continue;
      sum += ds.data.col(static_cast<Eigen::Index>(j)).squaredNorm();
      ++count;
    }
    const double s2 = noise.variance(l);
    const double expected = 13.0 + d * s2;
    const double var = 2.0 * (81.0 + 16.0) + 2.0 * d * s2 * s2;
    EXPECT_NEAR(sum / count, expected, 3.0 * std::sqrt(var / count)) << "group " << l;
  }
}

}  // namespace
}  // namespace wpca
