#pragma once

#include <cmath>
#include <functional>

// Independent 1-D minimizer: coarse grid scan, then golden-section refinement
// on the bracket around the best grid point. Assumes f unimodal near the minimum.
inline double golden_min(const std::function<double(double)>& f, double lo, double hi,
                         int grid = 2000, double tol = 1e-12) {
  double best = lo;
  double best_val = f(lo);
  const double h = (hi - lo) / grid;
  for (int i = 1; i <= grid; ++i) {
    const double t = lo + h * i;
    const double v = f(t);
    if (v < best_val) {
      best_val = v;
      best = t;
    }
  }
  double a = std::max(lo, best - h);
  double b = std::min(hi, best + h);
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - r * (b - a), x2 = a + r * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - r * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + r * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

// Minimizer of a convex 1-D function on [lo, hi] from its right derivative:
// bisection on the sign change of d+. Resolves the argmin to machine precision,
// unlike value comparisons which stall near sqrt(eps).
inline double bisect_min(const std::function<double(double)>& dplus, double lo, double hi) {
  if (dplus(lo) >= 0.0) return lo;
  for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (dplus(mid) >= 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

// Right derivative of |t|.
inline double abs_dplus(double t) { return t >= 0.0 ? 1.0 : -1.0; }
