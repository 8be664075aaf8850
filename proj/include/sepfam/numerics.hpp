#pragma once

// Special functions, scalar root finding and seeded random streams shared by
// the model, test and sampling code.

#include <cstdint>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "sepfam/errors.hpp"

namespace sepfam {

// ---------------------------------------------------------------------------
// Special functions
// ---------------------------------------------------------------------------

/// ln Gamma(x) for x > 0. Upward recurrence to x >= 15 followed by the
/// Stirling series; relative error around 1e-15 away from the zeros at 1, 2.
double log_gamma(double x);

/// psi(x) = d/dx ln Gamma(x) for x > 0.
double digamma(double x);

/// Regularized lower incomplete gamma P(a, x).
double gamma_p(double a, double x);

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x), computed
/// directly so that small upper tails keep their relative accuracy.
double gamma_q(double a, double x);

double chi2_cdf(double x, double df);
double chi2_quantile(double q, double df);

double std_normal_cdf(double z);

/// Two-tailed standard normal tail probability Pr(|Z| > |z|).
double two_tailed_normal_p(double z);

// ---------------------------------------------------------------------------
// Root finding
// ---------------------------------------------------------------------------

struct RootBracket {
  double lo;
  double hi;
};

/// Safeguarded Newton iteration with bisection fallback. `f` returns the
/// residual; `df` its derivative. Iterates never leave the bracket.
/// Without a sign change, falls back to clamped Newton from the midpoint and
/// throws NoRootError if that does not reach |f| <= tol.
template <class F, class DF>
double solve_scalar_root(F&& f, DF&& df, RootBracket bracket, double tol);

// ---------------------------------------------------------------------------
// Random streams
// ---------------------------------------------------------------------------

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix_seed(std::uint64_t x);

/// Seed for sub-stream `index` of a master seed. Depends only on the pair,
/// so streams are stable regardless of how many siblings exist or which
/// thread consumes them.
std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index);

inline Rng make_stream(std::uint64_t master, std::uint64_t index) {
  return Rng(stream_seed(master, index));
}

// Variates in the native parametrizations used throughout the library:
// lognormal(log-location, log-variance), gamma(scale, shape),
// Weibull(scale, shape).
double sample_lognormal(double alpha1, double alpha2, Rng& rng);
double sample_gamma(double scale, double shape, Rng& rng);
double sample_weibull(double scale, double shape, Rng& rng);

template <class F, class DF>
double solve_scalar_root(F&& f, DF&& df, RootBracket bracket, double tol) {
  if (!(bracket.lo < bracket.hi) || !std::isfinite(bracket.lo) ||
      !std::isfinite(bracket.hi)) {
    throw DomainError("solve_scalar_root: bracket must satisfy lo < hi");
  }
  constexpr int kMaxIter = 300;
  double lo = bracket.lo;
  double hi = bracket.hi;
  double flo = f(lo);
  double fhi = f(hi);
  if (std::abs(flo) <= tol) return lo;
  if (std::abs(fhi) <= tol) return hi;

  if (!(flo < 0.0) == !(fhi < 0.0) || std::isnan(flo) || std::isnan(fhi)) {
    // No usable sign change: plain Newton, clamped to the bracket.
    double x = 0.5 * (lo + hi);
    for (int i = 0; i < kMaxIter; ++i) {
      const double fx = f(x);
      if (std::abs(fx) <= tol) return x;
      const double d = df(x);
      if (!std::isfinite(fx) || !std::isfinite(d) || d == 0.0) break;
      const double next = std::clamp(x - fx / d, lo, hi);
      if (next == x) break;
      x = next;
    }
    throw NoRootError("solve_scalar_root: no sign change and Newton did not converge");
  }

  // Orient so that f(lo) < 0 < f(hi).
  if (flo > 0.0) {
    std::swap(lo, hi);
  }
  double x = 0.5 * (lo + hi);
  double step_old = std::abs(hi - lo);
  double step = step_old;
  double fx = f(x);
  double dfx = df(x);
  for (int i = 0; i < kMaxIter; ++i) {
    if (std::abs(fx) <= tol) return x;
    const bool newton_leaves =
        ((x - hi) * dfx - fx) * ((x - lo) * dfx - fx) > 0.0;
    const bool newton_slow = std::abs(2.0 * fx) > std::abs(step_old * dfx);
    if (newton_leaves || newton_slow || !std::isfinite(dfx) || dfx == 0.0) {
      step_old = step;
      step = 0.5 * (hi - lo);
      x = lo + step;
    } else {
      step_old = step;
      step = fx / dfx;
      x -= step;
    }
    if (std::abs(hi - lo) <= 4.0 * std::numeric_limits<double>::epsilon() *
                                     std::max(1.0, std::abs(x))) {
      return x;
    }
    fx = f(x);
    dfx = df(x);
    if (fx < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
  }
  throw NoRootError("solve_scalar_root: iteration limit reached");
}

}  // namespace sepfam
