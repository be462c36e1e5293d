#include "wpca/model.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>

namespace wpca {

namespace {

constexpr double kProportionTol = 1e-12;

}  // namespace

NoiseProfile::NoiseProfile(std::vector<NoiseGroup> groups, ZeroNoise zero_noise)
    : groups_(std::move(groups)) {
  if (groups_.empty()) {
    throw std::invalid_argument("noise profile needs at least one group");
  }
  double total = 0.0;
  bool any_noise = false;
  for (std::size_t l = 0; l < groups_.size(); ++l) {
    const auto& g = groups_[l];
    if (!(g.proportion >= 0.0 && g.proportion <= 1.0)) {
      throw std::invalid_argument("noise group " + std::to_string(l) +
                                  ": proportion must lie in [0, 1]");
    }
    if (!(g.variance >= 0.0) || !std::isfinite(g.variance)) {
      throw std::invalid_argument("noise group " + std::to_string(l) +
                                  ": variance must be finite and nonnegative");
    }
    for (std::size_t m = 0; m < l; ++m) {
      if (groups_[m].variance == g.variance) {
        throw std::invalid_argument(
            "noise groups " + std::to_string(m) + " and " + std::to_string(l) +
            " share a variance; merge them");
      }
    }
    total += g.proportion;
    any_noise = any_noise || g.variance > 0.0;
  }
  if (std::abs(total - 1.0) > kProportionTol) {
    throw std::invalid_argument("noise proportions must sum to 1");
  }
  if (!any_noise && zero_noise == ZeroNoise::reject) {
    throw std::invalid_argument(
        "all noise variances are zero; request the noiseless case explicitly");
  }
}

NoiseProfile NoiseProfile::merged(std::vector<NoiseGroup> groups,
                                  ZeroNoise zero_noise) {
  std::vector<NoiseGroup> out;
  for (const auto& g : groups) {
    auto it = std::find_if(out.begin(), out.end(), [&](const NoiseGroup& o) {
      return o.variance == g.variance;
    });
    if (it == out.end()) {
      out.push_back(g);
    } else {
      it->proportion += g.proportion;
    }
  }
  return NoiseProfile(std::move(out), zero_noise);
}

std::vector<double> NoiseProfile::proportions() const {
  std::vector<double> p;
  p.reserve(groups_.size());
  for (const auto& g : groups_) p.push_back(g.proportion);
  return p;
}

std::vector<double> NoiseProfile::variances() const {
  std::vector<double> v;
  v.reserve(groups_.size());
  for (const auto& g : groups_) v.push_back(g.variance);
  return v;
}

double NoiseProfile::average_variance() const {
  double s = 0.0;
  for (const auto& g : groups_) s += g.proportion * g.variance;
  return s;
}

double NoiseProfile::harmonic_variance() const {
  double inv = 0.0;
  for (const auto& g : groups_) {
    if (g.proportion == 0.0) continue;
    if (g.variance == 0.0) {
      throw std::invalid_argument(
          "average inverse variance undefined with a noiseless group");
    }
    inv += g.proportion / g.variance;
  }
  return 1.0 / inv;
}

std::vector<std::size_t> NoiseProfile::group_counts(std::size_t n) const {
  std::vector<std::size_t> counts(groups_.size(), 0);
  std::size_t assigned = 0;
  for (std::size_t l = 0; l + 1 < groups_.size(); ++l) {
    counts[l] = static_cast<std::size_t>(
        std::llround(groups_[l].proportion * static_cast<double>(n)));
    assigned += counts[l];
  }
  if (assigned > n) {
    throw std::invalid_argument(
        "noise proportions cannot be represented with n samples");
  }
  counts.back() = n - assigned;
  return counts;
}

SpikeModel::SpikeModel(double c, std::vector<double> amplitudes)
    : c_(c), amplitudes_(std::move(amplitudes)) {
  if (!(c_ > 0.0) || !std::isfinite(c_)) {
    throw std::invalid_argument("c must be positive");
  }
  if (amplitudes_.empty()) {
    throw std::invalid_argument("amplitudes must be a non-empty list");
  }
  for (double a : amplitudes_) {
    if (!(a > 0.0) || !std::isfinite(a)) {
      throw std::invalid_argument("amplitudes must be positive");
    }
  }
  std::stable_sort(amplitudes_.begin(), amplitudes_.end(), std::greater<>());
}

Eigen::MatrixXd SyntheticDataset::signal() const {
  const Eigen::VectorXd theta = amplitudes.cwiseSqrt();
  return components * theta.asDiagonal() * scores.transpose();
}

SyntheticDataset generate_dataset(const SpikeModel& spike,
                                  const NoiseProfile& noise, std::size_t d,
                                  std::size_t n, ScoreDistribution score_dist,
                                  std::uint64_t seed) {
  const std::size_t k = spike.k();
  if (d < k || n < k) {
    throw std::invalid_argument("d and n must be at least k");
  }
  const auto counts = noise.group_counts(n);

  SyntheticDataset out;
  out.d = d;
  out.n = n;
  out.seed = seed;
  out.amplitudes.resize(static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < k; ++i) out.amplitudes(i) = spike.amplitude(i);

  out.noise_labels.reserve(n);
  out.noise_std.reserve(n);
  for (std::size_t l = 0; l < counts.size(); ++l) {
    const double eta = std::sqrt(noise.variance(l));
    for (std::size_t j = 0; j < counts[l]; ++j) {
      out.noise_labels.push_back(l);
      out.noise_std.push_back(eta);
    }
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto di = static_cast<Eigen::Index>(d);
  const auto ni = static_cast<Eigen::Index>(n);
  const auto ki = static_cast<Eigen::Index>(k);

  Eigen::MatrixXd gauss(di, ki);
  for (Eigen::Index c = 0; c < ki; ++c)
    for (Eigen::Index r = 0; r < di; ++r) gauss(r, c) = normal(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(gauss);
  out.components = qr.householderQ() * Eigen::MatrixXd::Identity(di, ki);

  out.scores.resize(ni, ki);
  if (score_dist == ScoreDistribution::gaussian) {
    for (Eigen::Index c = 0; c < ki; ++c)
      for (Eigen::Index r = 0; r < ni; ++r) out.scores(r, c) = normal(rng);
  } else {
    std::bernoulli_distribution coin(0.5);
    for (Eigen::Index c = 0; c < ki; ++c)
      for (Eigen::Index r = 0; r < ni; ++r)
        out.scores(r, c) = coin(rng) ? 1.0 : -1.0;
  }

  out.data = out.signal();
  for (Eigen::Index j = 0; j < ni; ++j) {
    const double eta = out.noise_std[static_cast<std::size_t>(j)];
    auto col = out.data.col(j);
    for (Eigen::Index r = 0; r < di; ++r) col(r) += eta * normal(rng);
  }
  return out;
}

}  // namespace wpca
