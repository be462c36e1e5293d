#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wpca/model.hpp"

namespace wpca {

enum class WeightKind {
  uniform,
  binary,
  inverse_variance,
  square_inverse_variance,
  optimal,
  custom,
};

enum class Normalization { none, unit_average, unit_max };

std::string_view to_string(WeightKind kind);
std::string_view to_string(Normalization norm);
std::optional<WeightKind> parse_weight_kind(std::string_view name);
std::optional<Normalization> parse_normalization(std::string_view name);

/// Per-group weight values w_l^2 under a normalization convention.
struct WeightScheme {
  WeightKind kind = WeightKind::uniform;
  std::vector<double> per_group;
  Normalization normalization = Normalization::none;
};

/// Builds one of the standard weight families for a noise profile.
///
///   uniform                  w^2 = 1
///   binary                   w^2 = mask ? 1 : 0
///   inverse_variance         w^2 = 1 / sigma^2
///   square_inverse_variance  w^2 = 1 / sigma^4
///   optimal                  w^2 = 1 / (sigma^2 (theta^2 + sigma^2))
///
/// theta2 is required only for `optimal`, the mask only for `binary`. The
/// optimal weights maximize component recovery for that single amplitude.
/// Use make_custom_scheme for `custom`.
WeightScheme make_scheme(WeightKind kind, const NoiseProfile& noise,
                         std::optional<double> theta2 = std::nullopt,
                         std::optional<std::vector<bool>> binary_mask = std::nullopt,
                         Normalization normalization = Normalization::none);

WeightScheme make_custom_scheme(std::vector<double> per_group,
                                const NoiseProfile& noise,
                                Normalization normalization = Normalization::none);

/// Rescales per-group weights in place. unit_average enforces
/// sum_l p_l w_l^2 = 1, unit_max enforces max_l w_l^2 = 1.
void normalize_weights(std::vector<double>& per_group, const NoiseProfile& noise,
                       Normalization normalization);

/// Largest real root of
///   R(x) = 1 - sum_l rate_l (theta^2 / sigma_l^2) (1 - x) / (sigma_l^2 / theta^2 + x)
/// over groups with rate_l > 0. R increases on (-min sigma_l^2 / theta^2, 1]
/// and R(1) = 1, so the root lies in that interval. A negative root means
/// the optimally weighted component is below the phase transition.
/// Requires at least one positive rate.
double optimal_recovery_root(std::span<const double> rates,
                             std::span<const double> variances, double theta2);

/// Component recovery achieved by optimal weights: the root for
/// rates c p_l, truncated at zero below the phase transition.
double optimal_recovery(double c, const NoiseProfile& noise, double theta2);

}  // namespace wpca
