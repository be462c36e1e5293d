#include "wpca/weighting.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "wpca/asymptotics.hpp"
#include "wpca/roots.hpp"

namespace wpca {

namespace {

constexpr std::array<std::pair<WeightKind, std::string_view>, 6> kKindNames{{
    {WeightKind::uniform, "uniform"},
    {WeightKind::binary, "binary"},
    {WeightKind::inverse_variance, "inverse_variance"},
    {WeightKind::square_inverse_variance, "square_inverse_variance"},
    {WeightKind::optimal, "optimal"},
    {WeightKind::custom, "custom"},
}};

constexpr std::array<std::pair<Normalization, std::string_view>, 3> kNormNames{{
    {Normalization::none, "none"},
    {Normalization::unit_average, "unit_average"},
    {Normalization::unit_max, "unit_max"},
}};

void require_positive_variances(const NoiseProfile& noise, WeightKind kind) {
  for (const auto& g : noise.groups()) {
    if (!(g.variance > 0.0)) {
      throw std::invalid_argument(std::string(to_string(kind)) +
                                  " weights need every noise variance positive");
    }
  }
}

void check_scheme(const std::vector<double>& w, const NoiseProfile& noise) {
  if (w.size() != noise.size()) {
    throw std::invalid_argument("weight count does not match noise groups");
  }
  bool any = false;
  for (std::size_t l = 0; l < w.size(); ++l) {
    if (!(w[l] >= 0.0) || !std::isfinite(w[l])) {
      throw std::invalid_argument("weights must be finite and nonnegative");
    }
    any = any || (w[l] > 0.0 && noise.proportion(l) > 0.0);
  }
  if (!any) {
    throw std::invalid_argument(
        "weights are zero on every group with positive proportion");
  }
}

}  // namespace

std::string_view to_string(WeightKind kind) {
  for (const auto& [k, name] : kKindNames)
    if (k == kind) return name;
  return "unknown";
}

std::string_view to_string(Normalization norm) {
  for (const auto& [k, name] : kNormNames)
    if (k == norm) return name;
  return "unknown";
}

std::optional<WeightKind> parse_weight_kind(std::string_view name) {
  for (const auto& [k, n] : kKindNames)
    if (n == name) return k;
  if (name == "inverse") return WeightKind::inverse_variance;
  if (name == "square_inverse") return WeightKind::square_inverse_variance;
  return std::nullopt;
}

std::optional<Normalization> parse_normalization(std::string_view name) {
  for (const auto& [k, n] : kNormNames)
    if (n == name) return k;
  return std::nullopt;
}

void normalize_weights(std::vector<double>& per_group, const NoiseProfile& noise,
                       Normalization normalization) {
  double scale = 1.0;
  switch (normalization) {
    case Normalization::none:
      return;
    case Normalization::unit_average: {
      double avg = 0.0;
      for (std::size_t l = 0; l < per_group.size(); ++l) {
        avg += noise.proportion(l) * per_group[l];
      }
      scale = avg;
      break;
    }
    case Normalization::unit_max:
      scale = *std::max_element(per_group.begin(), per_group.end());
      break;
  }
  if (!(scale > 0.0)) {
    throw std::invalid_argument("cannot normalize all-zero weights");
  }
  for (double& w : per_group) w /= scale;
}

WeightScheme make_scheme(WeightKind kind, const NoiseProfile& noise,
                         std::optional<double> theta2,
                         std::optional<std::vector<bool>> binary_mask,
                         Normalization normalization) {
  if (kind == WeightKind::custom) {
    throw std::invalid_argument("custom weights go through make_custom_scheme");
  }
  if ((kind == WeightKind::optimal) != theta2.has_value()) {
    throw std::invalid_argument(kind == WeightKind::optimal
                                    ? "optimal weights need theta^2"
                                    : "theta^2 applies only to optimal weights");
  }
  if ((kind == WeightKind::binary) != binary_mask.has_value()) {
    throw std::invalid_argument(kind == WeightKind::binary
                                    ? "binary weights need a mask"
                                    : "a mask applies only to binary weights");
  }

  WeightScheme scheme{kind, std::vector<double>(noise.size(), 1.0), normalization};
  auto& w = scheme.per_group;
  switch (kind) {
    case WeightKind::uniform:
    case WeightKind::custom:
      break;
    case WeightKind::binary:
      if (binary_mask->size() != noise.size()) {
        throw std::invalid_argument("binary mask length does not match noise groups");
      }
      for (std::size_t l = 0; l < w.size(); ++l) w[l] = (*binary_mask)[l] ? 1.0 : 0.0;
      break;
    case WeightKind::inverse_variance:
      require_positive_variances(noise, kind);
      for (std::size_t l = 0; l < w.size(); ++l) w[l] = 1.0 / noise.variance(l);
      break;
    case WeightKind::square_inverse_variance:
      require_positive_variances(noise, kind);
      for (std::size_t l = 0; l < w.size(); ++l) {
        w[l] = 1.0 / (noise.variance(l) * noise.variance(l));
      }
      break;
    case WeightKind::optimal: {
      require_positive_variances(noise, kind);
      if (!(*theta2 > 0.0) || !std::isfinite(*theta2)) {
        throw std::invalid_argument("theta^2 must be positive");
      }
      for (std::size_t l = 0; l < w.size(); ++l) {
        const double s2 = noise.variance(l);
        w[l] = 1.0 / (s2 * (*theta2 + s2));
      }
      break;
    }
  }
  check_scheme(w, noise);
  normalize_weights(w, noise, normalization);
  return scheme;
}

WeightScheme make_custom_scheme(std::vector<double> per_group,
                                const NoiseProfile& noise,
                                Normalization normalization) {
  check_scheme(per_group, noise);
  normalize_weights(per_group, noise, normalization);
  return WeightScheme{WeightKind::custom, std::move(per_group), normalization};
}

double optimal_recovery_root(std::span<const double> rates,
                             std::span<const double> variances, double theta2) {
  if (rates.size() != variances.size()) {
    throw std::invalid_argument("rates and variances differ in length");
  }
  if (!(theta2 > 0.0)) throw std::invalid_argument("theta^2 must be positive");
  double floor = std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l < rates.size(); ++l) {
    if (!(rates[l] >= 0.0)) throw std::invalid_argument("rates must be nonnegative");
    if (rates[l] == 0.0) continue;
    if (!(variances[l] > 0.0)) {
      throw std::invalid_argument("noise variances must be positive");
    }
    floor = std::min(floor, variances[l] / theta2);
  }
  if (!std::isfinite(floor)) {
    throw std::invalid_argument("at least one rate must be positive");
  }

  auto value = [&](double x) {
    double s = 0.0;
    for (std::size_t l = 0; l < rates.size(); ++l) {
      if (rates[l] == 0.0) continue;
      const double s2 = variances[l];
      s += rates[l] * (theta2 / s2) * (1.0 - x) / (s2 / theta2 + x);
    }
    return 1.0 - s;
  };
  // d/dx of (1 - x) / (a + x) is -(1 + a) / (a + x)^2.
  auto slope = [&](double x) {
    double s = 0.0;
    for (std::size_t l = 0; l < rates.size(); ++l) {
      if (rates[l] == 0.0) continue;
      const double s2 = variances[l];
      const double a = s2 / theta2;
      s += rates[l] * (theta2 / s2) * (1.0 + a) / ((a + x) * (a + x));
    }
    return s;
  };

  // R(1) = 1 > 0; R -> -inf as x approaches -floor from above.
  const double pole = -floor;
  double lo = pole + floor * 1e-9;
  for (int t = 0; value(lo) >= 0.0; ++t) {
    const double closer = pole + 0.5 * (lo - pole);
    if (closer <= pole || closer >= lo || t > 2000) return lo;
    lo = closer;
  }
  return roots::solve_increasing(value, slope, lo, 1.0, kDefaultRootTol);
}

double optimal_recovery(double c, const NoiseProfile& noise, double theta2) {
  if (!(c > 0.0)) throw std::invalid_argument("c must be positive");
  std::vector<double> rates = noise.proportions();
  for (double& r : rates) r *= c;
  return std::max(0.0, optimal_recovery_root(rates, noise.variances(), theta2));
}

}  // namespace wpca
