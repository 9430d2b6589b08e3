#pragma once

// Shared test helpers: quadrature oracles and random instance generation.
// Test-only code; kept independent of the code paths it is used to check.

#include <cmath>
#include <functional>
#include <vector>

#include "dopa/rng.hpp"

namespace dopa_test {

// Adaptive Simpson on [a, b].
inline double simpson_rec(const std::function<double(double)>& f, double a,
                          double b, double fa, double fm, double fb,
                          double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return simpson_rec(f, a, m, fa, flm, fm, left, tol * 0.5, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, tol * 0.5, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a,
                        double b, double tol = 1e-10) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(f, a, b, fa, fm, fb, whole, tol, 48);
}

// integral of q over (0, p) where q may have integrable power/log
// singularities at 0 and 1. The t = x^4 substitution flattens both ends.
inline double quantile_integral(const std::function<double(double)>& q,
                                double p, double tol = 1e-10) {
  if (p <= 0.0) return 0.0;
  const double split = 0.5 * p;
  // left piece: t = split * x^4
  const double left = integrate(
      [&](double x) {
        const double t = split * x * x * x * x;
        if (t <= 0.0) return 0.0;
        return q(t) * 4.0 * split * x * x * x;
      },
      0.0, 1.0, tol * 0.5);
  // right piece: t = p - (p - split) * y^4, regularizes a singularity at p=1
  const double width = p - split;
  const double right = integrate(
      [&](double y) {
        const double t = p - width * y * y * y * y;
        if (t >= 1.0) return 0.0;
        return q(t) * 4.0 * width * y * y * y;
      },
      0.0, 1.0, tol * 0.5);
  return left + right;
}

inline std::vector<double> random_u(dopa::SplitMix64& rng, int k, double lo,
                                    double hi) {
  std::vector<double> u(k);
  for (double& v : u) v = lo + (hi - lo) * rng.next_open01();
  return u;
}

inline double inf_dist(const std::vector<double>& a,
                       const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d = std::max(d, std::abs(a[i] - b[i]));
  }
  return d;
}

}  // namespace dopa_test
