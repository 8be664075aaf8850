#pragma once

// Adaptive Simpson quadrature, used as an oracle for density normalization.

#include <cmath>
#include <functional>

namespace quad {

inline double simpson(const std::function<double(double)>& f, double a, double b, double fa,
                      double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) {
    return left + right + (left + right - whole) / 15.0;
  }
  return simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-10) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  return simpson(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, 50);
}

// Integral of a density over (0, inf) after y = exp(u), in unit pieces so
// narrow peaks are not missed.
inline double total_mass(const std::function<double(double)>& density) {
  const auto g = [&](double u) {
    const double y = std::exp(u);
    return density(y) * y;
  };
  double sum = 0.0;
  for (double u = -60.0; u < 60.0; u += 1.0) sum += integrate(g, u, u + 1.0);
  return sum;
}

}  // namespace quad
