#include "sepfam/numerics.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "sepfam/errors.hpp"

namespace sepfam {

namespace {

constexpr double kShiftThreshold = 15.0;
constexpr double kHalfLog2Pi = 0.91893853320467274178;  // ln(2 pi) / 2

// Stirling correction sum_{k} B_{2k} / (2k (2k-1) x^{2k-1}) for x >= 15.
double stirling_tail(double x) {
  constexpr std::array<double, 8> c = {
      1.0 / 12.0,        -1.0 / 360.0,  1.0 / 1260.0, -1.0 / 1680.0,
      1.0 / 1188.0,      -691.0 / 360360.0, 1.0 / 156.0, -3617.0 / 122400.0};
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) {
    acc = acc * inv2 + *it;
  }
  return acc * inv;
}

double incomplete_gamma_series(double a, double x, double log_prefactor) {
  // P(a, x) = e^{-x} x^a / Gamma(a + 1) * sum_n x^n / ((a+1)...(a+n))
  double term = 1.0 / a;
  double sum = term;
  double ap = a;
  for (int n = 0; n < 10000; ++n) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-17) break;
  }
  return sum * std::exp(log_prefactor);
}

double incomplete_gamma_cf(double a, double x, double log_prefactor) {
  // Modified Lentz evaluation of the continued fraction for Q(a, x).
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return std::exp(log_prefactor) * h;
}

void check_incomplete_gamma_args(double a, double x) {
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw DomainError("incomplete gamma: shape must be positive and finite");
  }
  if (!(x >= 0.0) || std::isnan(x)) {
    throw DomainError("incomplete gamma: argument must be non-negative");
  }
}

}  // namespace

double log_gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError("log_gamma: argument must be positive and finite");
  }
  if (x == 1.0 || x == 2.0) return 0.0;
  double shift_log = 0.0;
  if (x < kShiftThreshold) {
    double prod = 1.0;
    while (x < kShiftThreshold) {
      prod *= x;
      x += 1.0;
    }
    shift_log = std::log(prod);
  }
  return (x - 0.5) * std::log(x) - x + kHalfLog2Pi + stirling_tail(x) - shift_log;
}

double digamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError("digamma: argument must be positive and finite");
  }
  double shift = 0.0;
  while (x < kShiftThreshold) {
    shift -= 1.0 / x;
    x += 1.0;
  }
  const double inv2 = 1.0 / (x * x);
  // sum B_{2k} / (2k x^{2k})
  const double series =
      inv2 * (1.0 / 12.0 -
              inv2 * (1.0 / 120.0 -
                      inv2 * (1.0 / 252.0 -
                              inv2 * (1.0 / 240.0 -
                                      inv2 * (1.0 / 132.0 -
                                              inv2 * (691.0 / 32760.0 -
                                                      inv2 / 12.0))))));
  return shift + std::log(x) - 0.5 / x - series;
}

double gamma_p(double a, double x) {
  check_incomplete_gamma_args(a, x);
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  const double log_prefactor = a * std::log(x) - x - log_gamma(a);
  if (x < a + 1.0) return incomplete_gamma_series(a, x, log_prefactor);
  return 1.0 - incomplete_gamma_cf(a, x, log_prefactor);
}

double gamma_q(double a, double x) {
  check_incomplete_gamma_args(a, x);
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  const double log_prefactor = a * std::log(x) - x - log_gamma(a);
  if (x < a + 1.0) return 1.0 - incomplete_gamma_series(a, x, log_prefactor);
  return incomplete_gamma_cf(a, x, log_prefactor);
}

double chi2_cdf(double x, double df) {
  if (!(df > 0.0) || !std::isfinite(df)) {
    throw DomainError("chi2_cdf: degrees of freedom must be positive");
  }
  if (std::isnan(x) || x < 0.0) {
    throw DomainError("chi2_cdf: argument must be non-negative");
  }
  return gamma_p(0.5 * df, 0.5 * x);
}

double chi2_quantile(double q, double df) {
  if (!(q > 0.0 && q < 1.0)) {
    throw DomainError("chi2_quantile: probability must lie in (0, 1)");
  }
  if (!(df > 0.0) || !std::isfinite(df)) {
    throw DomainError("chi2_quantile: degrees of freedom must be positive");
  }
  const double a = 0.5 * df;
  const double log_norm = a * std::numbers::ln2 + log_gamma(a);
  auto density = [&](double x) {
    if (x <= 0.0) return 0.0;
    return std::exp((a - 1.0) * std::log(x) - 0.5 * x - log_norm);
  };

  // Work on whichever tail is smaller so the residual keeps relative accuracy.
  const bool upper = q > 0.5;
  const double target = upper ? 1.0 - q : q;
  auto residual = [&](double x) {
    return upper ? target - gamma_q(a, 0.5 * x) : gamma_p(a, 0.5 * x) - target;
  };
  auto slope = [&](double x) { return density(x); };

  double hi = std::max(1.0, df);
  while (residual(hi) < 0.0) {
    hi *= 2.0;
    if (hi > 1e300) throw NoRootError("chi2_quantile: failed to bracket");
  }
  return solve_scalar_root(residual, slope, RootBracket{0.0, hi}, target * 1e-15);
}

double std_normal_cdf(double z) {
  if (!std::isfinite(z)) {
    throw DomainError("std_normal_cdf: argument must be finite");
  }
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

double two_tailed_normal_p(double z) {
  if (!std::isfinite(z)) {
    throw DomainError("two_tailed_normal_p: argument must be finite");
  }
  return std::erfc(std::abs(z) / std::numbers::sqrt2);
}

std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index) {
  return mix_seed(mix_seed(master) ^ mix_seed(index + 0x632BE59BD9B4E019ULL));
}

double sample_lognormal(double alpha1, double alpha2, Rng& rng) {
  if (!std::isfinite(alpha1) || !(alpha2 > 0.0) || !std::isfinite(alpha2)) {
    throw DomainError("sample_lognormal: invalid parameters");
  }
  std::lognormal_distribution<double> dist(alpha1, std::sqrt(alpha2));
  return dist(rng);
}

double sample_gamma(double scale, double shape, Rng& rng) {
  if (!(scale > 0.0) || !(shape > 0.0) || !std::isfinite(scale) || !std::isfinite(shape)) {
    throw DomainError("sample_gamma: invalid parameters");
  }
  std::gamma_distribution<double> dist(shape, scale);
  return dist(rng);
}

double sample_weibull(double scale, double shape, Rng& rng) {
  if (!(scale > 0.0) || !(shape > 0.0) || !std::isfinite(scale) || !std::isfinite(shape)) {
    throw DomainError("sample_weibull: invalid parameters");
  }
  std::weibull_distribution<double> dist(shape, scale);
  return dist(rng);
}

}  // namespace sepfam
