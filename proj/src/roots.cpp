#include "wpca/roots.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "wpca/errors.hpp"

namespace wpca::roots {

double solve_increasing(const ScalarFn& f, const ScalarFn& df, double lo,
                        double hi, double rel_tol) {
  // Bisection to rel_tol; continue to machine precision only if no
  // derivative is available for polishing.
  const double stop_tol = df ? rel_tol : 0.0;
  for (int it = 0; it < 4096; ++it) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if (fm < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= stop_tol * std::max(std::abs(lo), std::abs(hi))) break;
  }

  double x = lo + 0.5 * (hi - lo);
  if (!df) return x;

  for (int it = 0; it < 8; ++it) {
    const double fx = f(x);
    if (fx == 0.0) return x;
    if (fx < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    const double slope = df(x);
    double next = x - fx / slope;
    if (!(slope > 0.0) || !(next > lo && next < hi)) {
      next = lo + 0.5 * (hi - lo);
    }
    if (next == x) break;
    x = next;
  }
  return x;
}

double largest_root_above_pole(const ScalarFn& f, const ScalarFn& df,
                               double pole, double rel_tol) {
  double lo = pole * (1.0 + 1e-9) + 1e-300;
  // f must be negative just above the pole; creep closer if it is not.
  for (int t = 0; f(lo) >= 0.0; ++t) {
    const double closer = pole + 0.5 * (lo - pole);
    if (closer <= pole || closer >= lo || t > 2000) return lo;
    lo = closer;
  }

  double hi = 0.0;
  for (int t = 0;; ++t) {
    if (t > kMaxDoublings) {
      throw BracketError("root bracket expansion exceeded " +
                         std::to_string(kMaxDoublings) + " doublings");
    }
    hi = pole + std::ldexp(1.0, t);
    if (hi > lo && f(hi) > 0.0) break;
  }
  return solve_increasing(f, df, lo, hi, rel_tol);
}

}  // namespace wpca::roots
