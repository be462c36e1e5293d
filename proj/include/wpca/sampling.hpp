#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace wpca {

/// A source of samples: noise variance, cost per sample and availability
/// per dimension (q_l / d). An empty availability means unbounded.
struct Source {
  double variance = 1.0;
  double cost = 0.0;
  std::optional<double> availability;
};

/// Budget-constrained sampling design. Allocations c_l = n_l / d satisfy
///   c >= 0,  sum_l tau_l c_l <= T/d,  c_l <= q_l / d.
/// Every source has positive cost, finite availability, or both; this keeps
/// the polyhedron bounded.
class BudgetProblem {
 public:
  BudgetProblem(std::vector<Source> sources, double budget, double theta2);

  std::span<const Source> sources() const { return sources_; }
  std::size_t size() const { return sources_.size(); }
  double budget() const { return budget_; }
  double theta2() const { return theta2_; }
  std::vector<double> variances() const;

  bool feasible(std::span<const double> allocation, double tol = 1e-9) const;

  /// True when no coordinate can grow by more than tol without leaving the
  /// polyhedron.
  bool saturated(std::span<const double> allocation, double tol = 1e-9) const;

 private:
  std::vector<Source> sources_;
  double budget_;
  double theta2_;
};

struct SamplingPlan {
  std::vector<double> allocation;
  double recovery = 0.0;
  bool vertex = true;
  bool saturated = false;
};

/// Largest number of sources accepted by enumerate_vertices.
inline constexpr std::size_t kMaxSources = 20;

/// All extreme points of the budget polyhedron, sorted lexicographically.
///
/// Each vertex pins every coordinate to 0 or its availability, except at
/// most one coordinate that is fixed by the budget equality. Infeasible
/// candidates are dropped and duplicates (within 1e-12) merged.
std::vector<std::vector<double>> enumerate_vertices(const BudgetProblem& problem);

/// Optimally weighted component recovery for allocation c_l over sources
/// with the given variances: the largest root of
///   1 - sum_l c_l (theta^2 / sigma_l^2) (1 - x) / (sigma_l^2 / theta^2 + x),
/// truncated at zero. An all-zero allocation has recovery 0.
double recovery_for_allocation(std::span<const double> allocation,
                               std::span<const double> variances, double theta2);

/// Maximizes optimally weighted recovery over the vertices of the budget
/// polyhedron. Vertices are ranked by the untruncated root so the winner is
/// always saturated; exact ties go to the lexicographically largest
/// allocation.
SamplingPlan optimize_sampling(const BudgetProblem& problem);

}  // namespace wpca
