#pragma once

// Cox's test of separate families for the lognormal / Weibull pair, using the
// closed-form statistics, asymptotic variances and probability limits for
// that pair.

#include <span>

#include "sepfam/families.hpp"

namespace sepfam {

// Printed four-decimal constants; swap for the analytic values here if more
// precision is ever wanted.
inline constexpr double kCoxVarianceLognormalNull = 0.2183;  // per observation
inline constexpr double kCoxVarianceWeibullNull = 0.2834;    // per observation
inline constexpr double kEulerGamma4 = 0.5772;
inline constexpr double kPiSquaredOverSix4 = 1.6449;

enum class CoxDirection { LognormalNull, WeibullNull };

struct CoxResult {
  CoxDirection direction;
  double t_stat;
  double variance;
  double deviate;  // t_stat / sqrt(variance)
  double p_value;  // two-tailed
  LognormalParams lognormal_fit;
  WeibullParams weibull_fit;
};

/// H_f: lognormal against H_g: Weibull.
CoxResult cox_lognormal_null(std::span<const double> data);

/// H_g: Weibull against H_f: lognormal.
CoxResult cox_weibull_null(std::span<const double> data);

/// |deviate| > z_crit, with 1.96 for a 5% two-tailed test.
inline bool cox_rejects(const CoxResult& r, double z_crit = 1.96) {
  return r.deviate > z_crit || r.deviate < -z_crit;
}

}  // namespace sepfam
