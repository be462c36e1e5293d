#include "wpca/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "wpca/roots.hpp"

namespace wpca {

namespace {

double pole_of(const AsymptoticConfig& cfg, std::size_t l) {
  return cfg.weights()[l] * cfg.noise().variance(l);
}

void check_not_pole(double x, const AsymptoticConfig& cfg) {
  for (std::size_t l = 0; l < cfg.noise().size(); ++l) {
    if (cfg.active(l) && x == pole_of(cfg, l)) {
      throw std::domain_error("evaluation at a pole x = " + std::to_string(x));
    }
  }
}

void check_theta2(double theta2) {
  if (!(theta2 > 0.0) || !std::isfinite(theta2)) {
    throw std::invalid_argument("theta^2 must be positive");
  }
}

}  // namespace

AsymptoticConfig::AsymptoticConfig(double c, NoiseProfile noise,
                                   std::vector<double> weights,
                                   double root_tol)
    : c_(c), noise_(std::move(noise)), weights_(std::move(weights)),
      root_tol_(root_tol) {
  if (!(c_ > 0.0) || !std::isfinite(c_)) {
    throw std::invalid_argument("c must be positive");
  }
  if (!(root_tol_ > 0.0)) {
    throw std::invalid_argument("root_tol must be positive");
  }
  if (weights_.size() != noise_.size()) {
    throw std::invalid_argument("weights length " +
                                std::to_string(weights_.size()) +
                                " does not match " +
                                std::to_string(noise_.size()) + " noise groups");
  }
  bool any_active = false;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    if (!(weights_[l] >= 0.0) || !std::isfinite(weights_[l])) {
      throw std::invalid_argument("weights must be finite and nonnegative");
    }
    if (active(l)) {
      pole_max_ = any_active ? std::max(pole_max_, pole_of(*this, l))
                             : pole_of(*this, l);
      any_active = true;
    }
  }
  if (!any_active) {
    throw std::invalid_argument(
        "at least one group needs positive weight and proportion");
  }
}

bool AsymptoticConfig::active(std::size_t l) const {
  return weights_.at(l) > 0.0 && noise_.proportion(l) > 0.0;
}

double AsymptoticConfig::average_weight() const {
  double s = 0.0;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    s += noise_.proportion(l) * weights_[l];
  }
  return s;
}

AsymptoticConfig AsymptoticConfig::scaled(double factor) const {
  std::vector<double> w = weights_;
  for (double& v : w) v *= factor;
  return AsymptoticConfig(c_, noise_, std::move(w), root_tol_);
}

double eval_A(double x, const AsymptoticConfig& cfg) {
  check_not_pole(x, cfg);
  double s = 0.0;
  for (std::size_t l = 0; l < cfg.noise().size(); ++l) {
    if (!cfg.active(l)) continue;
    const double pole = pole_of(cfg, l);
    const double r = pole / (x - pole);
    s += cfg.noise().proportion(l) * r * r;
  }
  return 1.0 - cfg.c() * s;
}

double eval_B(double x, const AsymptoticConfig& cfg, double theta2) {
  check_not_pole(x, cfg);
  double s = 0.0;
  for (std::size_t l = 0; l < cfg.noise().size(); ++l) {
    if (!cfg.active(l)) continue;
    s += cfg.noise().proportion(l) * cfg.weights()[l] / (x - pole_of(cfg, l));
  }
  return 1.0 - cfg.c() * theta2 * s;
}

double eval_C(double x, const AsymptoticConfig& cfg) {
  check_not_pole(x, cfg);
  double s = 0.0;
  for (std::size_t l = 0; l < cfg.noise().size(); ++l) {
    if (!cfg.active(l)) continue;
    const double pole = pole_of(cfg, l);
    s += cfg.noise().proportion(l) * pole / (x - pole);
  }
  return 1.0 + cfg.c() * s;
}

double eval_A_prime(double x, const AsymptoticConfig& cfg) {
  check_not_pole(x, cfg);
  double s = 0.0;
  for (std::size_t l = 0; l < cfg.noise().size(); ++l) {
    if (!cfg.active(l)) continue;
    const double pole = pole_of(cfg, l);
    const double r = pole / (x - pole);
    s += cfg.noise().proportion(l) * r * r / (x - pole);
  }
  return 2.0 * cfg.c() * s;
}

double eval_B_prime(double x, const AsymptoticConfig& cfg, double theta2) {
  check_not_pole(x, cfg);
  double s = 0.0;
  for (std::size_t l = 0; l < cfg.noise().size(); ++l) {
    if (!cfg.active(l)) continue;
    const double gap = x - pole_of(cfg, l);
    s += cfg.noise().proportion(l) * cfg.weights()[l] / (gap * gap);
  }
  return cfg.c() * theta2 * s;
}

double largest_root_A(const AsymptoticConfig& cfg) {
  bool any_noise = false;
  for (std::size_t l = 0; l < cfg.noise().size(); ++l) {
    any_noise = any_noise || (cfg.active(l) && pole_of(cfg, l) > 0.0);
  }
  if (!any_noise) return cfg.pole_max();
  return roots::largest_root_above_pole(
      [&](double x) { return eval_A(x, cfg); },
      [&](double x) { return eval_A_prime(x, cfg); }, cfg.pole_max(),
      cfg.root_tol());
}

double largest_root_B(const AsymptoticConfig& cfg, double theta2) {
  check_theta2(theta2);
  return roots::largest_root_above_pole(
      [&](double x) { return eval_B(x, cfg, theta2); },
      [&](double x) { return eval_B_prime(x, cfg, theta2); }, cfg.pole_max(),
      cfg.root_tol());
}

RecoveryPrediction predict(const AsymptoticConfig& cfg, double theta2) {
  check_theta2(theta2);
  RecoveryPrediction out;
  out.alpha = largest_root_A(cfg);
  out.beta = largest_root_B(cfg, theta2);
  const double c = cfg.c();
  const double top = std::max(out.alpha, out.beta);
  out.amplitude_limit = top * eval_C(top, cfg) / c;

  const double a_beta = eval_A(out.beta, cfg);
  out.above_transition = a_beta > 0.0 && out.beta > out.alpha;
  if (out.above_transition) {
    const double ratio = a_beta / eval_B_prime(out.beta, cfg, theta2);
    out.component_recovery = ratio / out.beta;
    out.score_recovery = ratio / (c * theta2 * eval_C(out.beta, cfg));
    out.cross_product = std::sqrt(out.component_recovery * out.score_recovery);
  } else {
    out.truncated = true;
  }
  return out;
}

RecoveryPrediction predict_inverse_variance(double c, const NoiseProfile& noise,
                                            double theta2) {
  if (!(c > 0.0)) throw std::invalid_argument("c must be positive");
  check_theta2(theta2);
  for (const auto& g : noise.groups()) {
    if (!(g.variance > 0.0)) {
      throw std::invalid_argument(
          "inverse-variance weights need every noise variance positive");
    }
  }
  const double s2 = noise.harmonic_variance();
  const double s4 = s2 * s2;
  RecoveryPrediction out;
  out.alpha = s2 * (1.0 + std::sqrt(c));
  out.beta = s2 + c * theta2;
  if (c * theta2 * theta2 > s4) {
    out.above_transition = true;
    out.amplitude_limit =
        theta2 * (1.0 + s2 / (c * theta2)) * (1.0 + s2 / theta2);
    const double numer = c - s4 / (theta2 * theta2);
    out.component_recovery = numer / (c + s2 / theta2);
    out.score_recovery = numer / (c * (1.0 + s2 / theta2));
    out.cross_product = std::sqrt(out.component_recovery * out.score_recovery);
  } else {
    const double edge = 1.0 + 1.0 / std::sqrt(c);
    out.amplitude_limit = s2 * edge * edge;
    out.truncated = true;
  }
  return out;
}

AggregatePrediction aggregate_prediction(const AsymptoticConfig& cfg,
                                         const SpikeModel& spike) {
  if (std::abs(spike.c() - cfg.c()) > 1e-12 * cfg.c()) {
    throw std::invalid_argument("spike model and configuration disagree on c");
  }
  const double c = cfg.c();
  const double wbar = cfg.average_weight();
  AggregatePrediction out;
  for (double theta2 : spike.amplitudes()) {
    const RecoveryPrediction p = predict(cfg, theta2);
    out.subspace_recovery += p.component_recovery;
    out.aggregate_score_recovery += p.score_recovery;
    double term = c * wbar * theta2;
    if (p.above_transition) {
      term += p.beta * eval_C(p.beta, cfg) -
              2.0 * eval_A(p.beta, cfg) / eval_B_prime(p.beta, cfg, theta2);
    } else {
      term += c * p.amplitude_limit;
      out.truncated = true;
    }
    out.weighted_mse += term / c;
  }
  return out;
}

}  // namespace wpca
