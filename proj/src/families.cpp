#include "sepfam/families.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "sepfam/errors.hpp"

namespace sepfam {

namespace {

constexpr double kLog2Pi = 1.83787706640934548356;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_observation(double y) {
  if (!(y > 0.0) || !std::isfinite(y)) {
    throw DomainError("density evaluated at a non-positive or non-finite point");
  }
}

void check_data(std::span<const double> data, std::size_t min_size) {
  if (data.size() < min_size) {
    throw DegenerateDataError("at least " + std::to_string(min_size) +
                              " observations are required");
  }
  for (double y : data) {
    if (!(y > 0.0) || !std::isfinite(y)) {
      throw DomainError("data must be positive and finite");
    }
  }
}

bool positive_finite(double v) { return v > 0.0 && std::isfinite(v); }

}  // namespace

std::string_view family_name(FamilyId id) {
  switch (id) {
    case FamilyId::Lognormal:
      return "lognormal";
    case FamilyId::Gamma:
      return "gamma";
    case FamilyId::Weibull:
      return "weibull";
  }
  return "unknown";
}

FamilyId parse_family(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "lognormal" || lower == "ln" || lower == "l") return FamilyId::Lognormal;
  if (lower == "gamma" || lower == "g") return FamilyId::Gamma;
  if (lower == "weibull" || lower == "w") return FamilyId::Weibull;
  throw InputError("unknown family '" + std::string(name) + "'");
}

FamilyId family_of(const NativeParams& params) {
  return std::visit(Overloaded{[](const LognormalParams&) { return FamilyId::Lognormal; },
                               [](const GammaParams&) { return FamilyId::Gamma; },
                               [](const WeibullParams&) { return FamilyId::Weibull; }},
                    params);
}

void validate(const CommonParams& cp) {
  if (!positive_finite(cp.mu) || !positive_finite(cp.sigma2)) {
    throw DomainError("common parameters require mu > 0 and sigma2 > 0");
  }
}

void validate(const NativeParams& params) {
  const bool ok = std::visit(
      Overloaded{
          [](const LognormalParams& p) { return std::isfinite(p.alpha1) && positive_finite(p.alpha2); },
          [](const GammaParams& p) { return positive_finite(p.gamma1) && positive_finite(p.gamma2); },
          [](const WeibullParams& p) { return positive_finite(p.beta1) && positive_finite(p.beta2); }},
      params);
  if (!ok) throw DomainError("invalid native parameters for " +
                             std::string(family_name(family_of(params))));
}

// All scalar density evaluations go through LogDensity so that single-point
// and batched evaluations agree bit for bit.
double logpdf(const LognormalParams& p, double y) {
  check_observation(y);
  return LogDensity(p)(y, std::log(y));
}

double logpdf(const GammaParams& p, double y) {
  check_observation(y);
  return LogDensity(p)(y, std::log(y));
}

double logpdf(const WeibullParams& p, double y) {
  check_observation(y);
  return LogDensity(p)(y, std::log(y));
}

double logpdf_native(const NativeParams& params, double y) {
  validate(params);
  return std::visit([y](const auto& p) { return logpdf(p, y); }, params);
}

CommonParams moments(const NativeParams& params) {
  return std::visit(
      Overloaded{
          [](const LognormalParams& p) {
            const double mu = std::exp(p.alpha1 + 0.5 * p.alpha2);
            return CommonParams{mu, std::expm1(p.alpha2) * mu * mu};
          },
          [](const GammaParams& p) {
            return CommonParams{p.gamma1 * p.gamma2, p.gamma2 * p.gamma1 * p.gamma1};
          },
          [](const WeibullParams& p) {
            const double g1 = log_gamma(1.0 + 1.0 / p.beta2);
            const double g2 = log_gamma(1.0 + 2.0 / p.beta2);
            const double mu = p.beta1 * std::exp(g1);
            // beta1^2 (G2 - G1^2) = mu^2 (exp(g2 - 2 g1) - 1)
            return CommonParams{mu, mu * mu * std::expm1(g2 - 2.0 * g1)};
          }},
      params);
}

LognormalParams lognormal_from_common(const CommonParams& cp) {
  validate(cp);
  const double alpha2 = std::log1p(cp.sigma2 / (cp.mu * cp.mu));
  return {std::log(cp.mu) - 0.5 * alpha2, alpha2};
}

GammaParams gamma_from_common(const CommonParams& cp) {
  validate(cp);
  return {cp.sigma2 / cp.mu, cp.mu * cp.mu / cp.sigma2};
}

WeibullParams weibull_from_common(const CommonParams& cp) {
  validate(cp);
  const double target = std::log1p(cp.sigma2 / (cp.mu * cp.mu));
  // u = ln(shape); residual increases with u.
  auto residual = [target](double u) {
    const double s = std::exp(-u);
    return 2.0 * log_gamma(1.0 + s) - log_gamma(1.0 + 2.0 * s) + target;
  };
  auto slope = [](double u) {
    const double s = std::exp(-u);
    return 2.0 * s * (digamma(1.0 + 2.0 * s) - digamma(1.0 + s));
  };
  const RootBracket bracket{std::log(1e-3), std::log(1e3)};
  const double lo = residual(bracket.lo);
  const double hi = residual(bracket.hi);
  if (!(lo < 0.0 && hi > 0.0)) {
    throw NoRootError("weibull_from_common: coefficient of variation out of range");
  }
  const double u = solve_scalar_root(residual, slope, bracket,
                                     1e-15 * std::max(1.0, target));
  const double shape = std::exp(u);
  return {cp.mu * std::exp(-log_gamma(1.0 + 1.0 / shape)), shape};
}

NativeParams from_common(FamilyId family, const CommonParams& cp) {
  switch (family) {
    case FamilyId::Lognormal:
      return lognormal_from_common(cp);
    case FamilyId::Gamma:
      return gamma_from_common(cp);
    case FamilyId::Weibull:
      return weibull_from_common(cp);
  }
  throw DomainError("unknown family");
}

double logpdf_common(FamilyId family, const CommonParams& cp, double y) {
  return logpdf_native(from_common(family, cp), y);
}

LogDensity::LogDensity(const NativeParams& params) : family_(family_of(params)) {
  validate(params);
  std::visit(Overloaded{[this](const LognormalParams& p) {
                          c0_ = -0.5 * (kLog2Pi + std::log(p.alpha2));
                          c2_ = p.alpha1;
                          c3_ = 0.5 / p.alpha2;
                        },
                        [this](const GammaParams& p) {
                          c0_ = -log_gamma(p.gamma2) - p.gamma2 * std::log(p.gamma1);
                          c1_ = p.gamma2 - 1.0;
                          c2_ = 1.0 / p.gamma1;
                        },
                        [this](const WeibullParams& p) {
                          c3_ = std::log(p.beta1);
                          c0_ = std::log(p.beta2) - p.beta2 * c3_;
                          c1_ = p.beta2 - 1.0;
                          c2_ = p.beta2;
                        }},
             params);
}

double LogDensity::operator()(double y, double log_y) const {
  switch (family_) {
    case FamilyId::Lognormal: {
      const double dev = log_y - c2_;
      return c0_ - log_y - c3_ * dev * dev;
    }
    case FamilyId::Gamma:
      return c0_ + c1_ * log_y - c2_ * y;
    case FamilyId::Weibull:
      return c0_ + c1_ * log_y - std::exp(c2_ * (log_y - c3_));
  }
  return -std::numeric_limits<double>::infinity();
}

double survival(const NativeParams& params, double t) {
  validate(params);
  if (std::isnan(t)) throw DomainError("survival: NaN time point");
  if (t <= 0.0) return 1.0;
  if (std::isinf(t)) return 0.0;
  return std::visit(
      Overloaded{[t](const LognormalParams& p) {
                   const double z = (std::log(t) - p.alpha1) / std::sqrt(p.alpha2);
                   return 0.5 * std::erfc(z / std::numbers::sqrt2);
                 },
                 [t](const GammaParams& p) { return gamma_q(p.gamma2, t / p.gamma1); },
                 [t](const WeibullParams& p) { return std::exp(-std::pow(t / p.beta1, p.beta2)); }},
      params);
}

double sample(const NativeParams& params, Rng& rng) {
  return std::visit(
      Overloaded{[&rng](const LognormalParams& p) { return sample_lognormal(p.alpha1, p.alpha2, rng); },
                 [&rng](const GammaParams& p) { return sample_gamma(p.gamma1, p.gamma2, rng); },
                 [&rng](const WeibullParams& p) { return sample_weibull(p.beta1, p.beta2, rng); }},
      params);
}

std::vector<double> sample_n(const NativeParams& params, std::size_t n, Rng& rng) {
  validate(params);
  std::vector<double> out(n);
  for (auto& v : out) v = sample(params, rng);
  return out;
}

LognormalParams mle_lognormal(std::span<const double> data) {
  check_data(data, 2);
  const double n = static_cast<double>(data.size());
  double mean = 0.0;
  for (double y : data) mean += std::log(y);
  mean /= n;
  double ss = 0.0;
  for (double y : data) {
    const double d = std::log(y) - mean;
    ss += d * d;
  }
  return {mean, ss / n};
}

WeibullParams mle_weibull(std::span<const double> data) {
  check_data(data, 2);
  const std::size_t n = data.size();
  std::vector<double> x(n);
  std::transform(data.begin(), data.end(), x.begin(), [](double y) { return std::log(y); });
  const double xmax = *std::max_element(x.begin(), x.end());
  const double xmin = *std::min_element(x.begin(), x.end());
  if (xmax == xmin) {
    throw DegenerateDataError("mle_weibull: all observations are equal");
  }
  // Centre at the maximum so exp(b x) never overflows.
  for (auto& v : x) v -= xmax;
  const double xbar = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);

  struct Moments {
    double sum_w, mean_x, var_x;
  };
  auto weighted = [&x](double b) {
    double sw = 0.0, swx = 0.0, swxx = 0.0;
    for (double v : x) {
      const double w = std::exp(b * v);
      sw += w;
      swx += w * v;
      swxx += w * v * v;
    }
    const double m = swx / sw;
    return Moments{sw, m, std::max(0.0, swxx / sw - m * m)};
  };
  // G(b) = E_w[x] - 1/b - mean(x), increasing in b; solved in u = ln b.
  auto residual = [&](double u) {
    const double b = std::exp(u);
    return weighted(b).mean_x - 1.0 / b - xbar;
  };
  auto slope = [&](double u) {
    const double b = std::exp(u);
    return b * weighted(b).var_x + 1.0 / b;
  };

  // The root scales inversely with the spread of ln y.
  const double spread = xmax - xmin;
  RootBracket bracket{std::log(1e-3 / spread), std::log(1e3 / spread)};
  while (residual(bracket.lo) > 0.0) bracket.lo -= 2.0;
  while (residual(bracket.hi) < 0.0) bracket.hi += 2.0;
  const double u = solve_scalar_root(residual, slope, bracket, 1e-14);
  const double shape = std::exp(u);
  const double mean_w = weighted(shape).sum_w / static_cast<double>(n);
  return {std::exp(xmax + std::log(mean_w) / shape), shape};
}

double loglik(const NativeParams& params, std::span<const double> data) {
  validate(params);
  double total = 0.0;
  for (double y : data) total += std::visit([y](const auto& p) { return logpdf(p, y); }, params);
  return total;
}

}  // namespace sepfam
