#pragma once

// Lognormal, gamma and Weibull densities in their native parametrizations and
// in the shared (mean, variance) parametrization, plus maximum-likelihood
// fitting used by the Cox statistics.

#include <array>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "sepfam/numerics.hpp"

namespace sepfam {

enum class FamilyId { Lognormal, Gamma, Weibull };

inline constexpr std::array<FamilyId, 3> kAllFamilies = {
    FamilyId::Lognormal, FamilyId::Gamma, FamilyId::Weibull};

std::string_view family_name(FamilyId id);
/// Accepts "lognormal"/"ln"/"l", "gamma"/"g", "weibull"/"w" (case-insensitive).
FamilyId parse_family(std::string_view name);

/// Population mean and variance shared by every mixture component.
struct CommonParams {
  double mu;
  double sigma2;
};

struct LognormalParams {
  double alpha1;  // mean of log y
  double alpha2;  // variance of log y
};

struct GammaParams {
  double gamma1;  // scale
  double gamma2;  // shape
};

struct WeibullParams {
  double beta1;  // scale
  double beta2;  // shape
};

using NativeParams = std::variant<LognormalParams, GammaParams, WeibullParams>;

FamilyId family_of(const NativeParams& params);

void validate(const CommonParams& cp);
void validate(const NativeParams& params);

double logpdf(const LognormalParams& p, double y);
double logpdf(const GammaParams& p, double y);
double logpdf(const WeibullParams& p, double y);
double logpdf_native(const NativeParams& params, double y);

/// Mean and variance implied by native parameters.
CommonParams moments(const NativeParams& params);

LognormalParams lognormal_from_common(const CommonParams& cp);
GammaParams gamma_from_common(const CommonParams& cp);
/// Solves 2 lnG(1+1/b) - lnG(1+2/b) + ln((mu^2+s2)/mu^2) = 0 for the shape b
/// by safeguarded Newton in ln b over b in [1e-3, 1e3]; throws NoRootError
/// when the coefficient of variation is outside what that range can express.
WeibullParams weibull_from_common(const CommonParams& cp);
NativeParams from_common(FamilyId family, const CommonParams& cp);

double logpdf_common(FamilyId family, const CommonParams& cp, double y);

/// Log density with all parameter-only terms folded into constants; evaluated
/// from a precomputed (y, ln y) pair. Used on hot paths (likelihoods inside
/// the sampler) where the same parameters are applied to many observations.
class LogDensity {
 public:
  explicit LogDensity(const NativeParams& params);
  double operator()(double y, double log_y) const;
  FamilyId family() const { return family_; }

 private:
  FamilyId family_;
  double c0_ = 0.0;  // additive constant
  double c1_ = 0.0;  // coefficient of ln y
  double c2_ = 0.0;  // family-specific second coefficient
  double c3_ = 0.0;  // family-specific third coefficient
};

/// Survival function 1 - F(t); t <= 0 gives 1.
double survival(const NativeParams& params, double t);

double sample(const NativeParams& params, Rng& rng);
std::vector<double> sample_n(const NativeParams& params, std::size_t n, Rng& rng);

// ---------------------------------------------------------------------------
// Maximum likelihood
// ---------------------------------------------------------------------------

/// Closed form: alpha1 = mean ln y, alpha2 = mean squared deviation of ln y
/// (divisor n). Zero log-variance is returned as-is; callers that need a
/// proper density check `alpha2 > 0`.
LognormalParams mle_lognormal(std::span<const double> data);

/// Profile-likelihood shape equation solved by safeguarded Newton in ln b.
/// Throws DegenerateDataError when all observations coincide.
WeibullParams mle_weibull(std::span<const double> data);

double loglik(const NativeParams& params, std::span<const double> data);

}  // namespace sepfam
