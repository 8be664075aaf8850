#include "sepfam/coxtest.hpp"

#include <cmath>

#include "sepfam/errors.hpp"

namespace sepfam {

namespace {

struct Fits {
  LognormalParams ln;
  WeibullParams w;
};

Fits fit_both(std::span<const double> data) {
  const LognormalParams ln = mle_lognormal(data);
  if (!(ln.alpha2 > 0.0)) {
    throw DegenerateDataError("Cox test: log-data have zero variance");
  }
  return {ln, mle_weibull(data)};
}

CoxResult finish(CoxDirection dir, double t_stat, double variance, const Fits& fits) {
  const double deviate = t_stat / std::sqrt(variance);
  return {dir, t_stat, variance, deviate, two_tailed_normal_p(deviate), fits.ln, fits.w};
}

}  // namespace

CoxResult cox_lognormal_null(std::span<const double> data) {
  const Fits fits = fit_both(data);
  const double n = static_cast<double>(data.size());
  const double a1 = fits.ln.alpha1;
  const double a2 = fits.ln.alpha2;
  const double b1 = fits.w.beta1;
  const double b2 = fits.w.beta2;
  // Probability limits of the Weibull MLEs under the fitted lognormal.
  const double b1_plim = std::exp(a1 + std::sqrt(a2) / 2.0);
  const double b2_plim = 1.0 / std::sqrt(a2);
  const double t = n * (b2 * std::log(b1) - b2_plim * std::log(b1_plim) - std::log(b2) +
                        std::log(b2_plim) - a1 * (b2 - b2_plim));
  return finish(CoxDirection::LognormalNull, t, kCoxVarianceLognormalNull * n, fits);
}

CoxResult cox_weibull_null(std::span<const double> data) {
  const Fits fits = fit_both(data);
  const double n = static_cast<double>(data.size());
  const double b1 = fits.w.beta1;
  const double b2 = fits.w.beta2;
  // Probability limits of the lognormal MLEs under the fitted Weibull.
  const double a1_plim = -kEulerGamma4 / b2 + std::log(b1);
  const double a2_plim = kPiSquaredOverSix4 / (b2 * b2);
  const double t = n * (b2 * (fits.ln.alpha1 - a1_plim) + 0.5 * std::log(fits.ln.alpha2 / a2_plim));
  return finish(CoxDirection::WeibullNull, t, kCoxVarianceWeibullNull * n, fits);
}

}  // namespace sepfam
