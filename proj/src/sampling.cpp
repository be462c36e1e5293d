#include "wpca/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "wpca/weighting.hpp"

namespace wpca {

namespace {

constexpr double kDedupTol = 1e-12;

bool near_equal(const std::vector<double>& a, const std::vector<double>& b) {
  for (std::size_t l = 0; l < a.size(); ++l) {
    if (std::abs(a[l] - b[l]) > kDedupTol) return false;
  }
  return true;
}

double raw_recovery(std::span<const double> allocation,
                    std::span<const double> variances, double theta2) {
  if (std::all_of(allocation.begin(), allocation.end(),
                  [](double c) { return c == 0.0; })) {
    return -std::numeric_limits<double>::infinity();
  }
  return optimal_recovery_root(allocation, variances, theta2);
}

}  // namespace

BudgetProblem::BudgetProblem(std::vector<Source> sources, double budget,
                             double theta2)
    : sources_(std::move(sources)), budget_(budget), theta2_(theta2) {
  if (sources_.empty()) throw std::invalid_argument("no sample sources");
  if (!(budget_ >= 0.0) || !std::isfinite(budget_)) {
    throw std::invalid_argument("budget must be finite and nonnegative");
  }
  if (!(theta2_ > 0.0) || !std::isfinite(theta2_)) {
    throw std::invalid_argument("theta^2 must be positive");
  }
  for (std::size_t l = 0; l < sources_.size(); ++l) {
    const auto& s = sources_[l];
    const std::string where = "source " + std::to_string(l) + ": ";
    if (!(s.variance > 0.0) || !std::isfinite(s.variance)) {
      throw std::invalid_argument(where + "variance must be positive");
    }
    if (!(s.cost >= 0.0) || !std::isfinite(s.cost)) {
      throw std::invalid_argument(where + "cost must be finite and nonnegative");
    }
    if (s.availability &&
        (!(*s.availability >= 0.0) || !std::isfinite(*s.availability))) {
      throw std::invalid_argument(where + "availability must be finite and nonnegative");
    }
    if (!s.availability && s.cost == 0.0) {
      throw std::invalid_argument(
          where + "free source with unbounded availability makes recovery unbounded");
    }
  }
}

std::vector<double> BudgetProblem::variances() const {
  std::vector<double> v;
  v.reserve(sources_.size());
  for (const auto& s : sources_) v.push_back(s.variance);
  return v;
}

bool BudgetProblem::feasible(std::span<const double> allocation, double tol) const {
  if (allocation.size() != sources_.size()) return false;
  double spent = 0.0;
  for (std::size_t l = 0; l < sources_.size(); ++l) {
    if (allocation[l] < -tol) return false;
    if (sources_[l].availability && allocation[l] > *sources_[l].availability + tol) {
      return false;
    }
    spent += allocation[l] * sources_[l].cost;
  }
  return spent <= budget_ + tol;
}

bool BudgetProblem::saturated(std::span<const double> allocation, double tol) const {
  double spent = 0.0;
  for (std::size_t l = 0; l < sources_.size(); ++l) {
    spent += allocation[l] * sources_[l].cost;
  }
  const double left = budget_ - spent;
  for (std::size_t l = 0; l < sources_.size(); ++l) {
    double room = std::numeric_limits<double>::infinity();
    if (sources_[l].availability) room = *sources_[l].availability - allocation[l];
    if (sources_[l].cost > 0.0) room = std::min(room, left / sources_[l].cost);
    if (room > tol) return false;
  }
  return true;
}

std::vector<std::vector<double>> enumerate_vertices(const BudgetProblem& problem) {
  const std::size_t L = problem.size();
  if (L > kMaxSources) {
    throw std::invalid_argument(
        "too many sources for vertex enumeration (" + std::to_string(L) +
        " > " + std::to_string(kMaxSources) +
        "); split the problem into smaller groups of sources");
  }
  const auto sources = problem.sources();
  const double tol = kDedupTol * std::max(1.0, problem.budget());

  std::vector<std::vector<double>> out;
  auto consider = [&](std::vector<double> c) {
    if (!problem.feasible(c, tol)) return;
    for (double& v : c) v = std::max(v, 0.0);
    for (const auto& seen : out) {
      if (near_equal(seen, c)) return;
    }
    out.push_back(std::move(c));
  };

  // Bit l of `upper` pins coordinate l at its availability instead of zero.
  // Unbounded coordinates cannot sit at an upper bound.
  std::size_t bounded_mask = 0;
  for (std::size_t l = 0; l < L; ++l) {
    if (sources[l].availability) bounded_mask |= std::size_t{1} << l;
  }
  const std::size_t combos = std::size_t{1} << L;
  std::vector<double> c(L);
  for (std::size_t upper = 0; upper < combos; ++upper) {
    if ((upper & ~bounded_mask) != 0) continue;
    double spent = 0.0;
    for (std::size_t l = 0; l < L; ++l) {
      c[l] = (upper >> l & 1U) ? *sources[l].availability : 0.0;
      spent += c[l] * sources[l].cost;
    }
    consider(c);

    // One free coordinate, set by the budget equality; its own bit must be
    // clear so each combination is visited once.
    for (std::size_t f = 0; f < L; ++f) {
      if ((upper >> f & 1U) || sources[f].cost <= 0.0) continue;
      std::vector<double> with_free = c;
      with_free[f] = (problem.budget() - spent) / sources[f].cost;
      consider(std::move(with_free));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

double recovery_for_allocation(std::span<const double> allocation,
                               std::span<const double> variances, double theta2) {
  return std::max(0.0, raw_recovery(allocation, variances, theta2));
}

SamplingPlan optimize_sampling(const BudgetProblem& problem) {
  const auto vertices = enumerate_vertices(problem);
  const auto variances = problem.variances();
  constexpr double kTieTol = 1e-12;

  SamplingPlan best;
  double best_score = -std::numeric_limits<double>::infinity();
  bool have = false;
  for (const auto& v : vertices) {
    const double score = raw_recovery(v, variances, problem.theta2());
    const bool better = !have || score > best_score + kTieTol ||
                        (std::abs(score - best_score) <= kTieTol &&
                         v > best.allocation) ||
                        (std::isinf(score) && std::isinf(best_score) &&
                         v > best.allocation);
    if (better) {
      best.allocation = v;
      best_score = score;
      have = true;
    }
  }
  best.recovery = std::isfinite(best_score) ? std::max(0.0, best_score) : 0.0;
  best.vertex = true;
  best.saturated = problem.saturated(best.allocation);
  return best;
}

}  // namespace wpca
