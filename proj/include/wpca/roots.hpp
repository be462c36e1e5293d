#pragma once

#include <functional>

namespace wpca::roots {

using ScalarFn = std::function<double(double)>;

/// Maximum number of doublings when growing an upper bracket.
inline constexpr int kMaxDoublings = 1000;

/// Root of a function that increases through zero on (lo, hi).
///
/// Requires f(lo) < 0 < f(hi). Bisects until the bracket width falls below
/// rel_tol * max(|lo|, |hi|), then polishes with safeguarded Newton steps
/// when a derivative is supplied (the iterate never leaves the bracket).
double solve_increasing(const ScalarFn& f, const ScalarFn& df, double lo,
                        double hi, double rel_tol);

/// Largest root of f on (pole, inf), where f increases monotonically from
/// -inf just above pole to a positive limit.
///
/// Lower bracket is pole * (1 + 1e-9) + 1e-300, moved toward the pole if f is
/// already nonnegative there; the upper bracket is pole + 2^t for t = 0, 1, ...
/// Throws BracketError after kMaxDoublings doublings.
double largest_root_above_pole(const ScalarFn& f, const ScalarFn& df,
                               double pole, double rel_tol);

}  // namespace wpca::roots
