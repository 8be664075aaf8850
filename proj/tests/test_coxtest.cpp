#include "catch_amalgamated.hpp"

#include <cmath>
#include <vector>

#include "sepfam/coxtest.hpp"

using namespace sepfam;
using Catch::Approx;

namespace {

std::vector<double> draw(const NativeParams& p, std::size_t n, std::uint64_t seed) {
  Rng rng = make_stream(seed, 0);
  return sample_n(p, n, rng);
}

struct MeanVar {
  double mean;
  double var;
};

MeanVar mean_var(const std::vector<double>& x) {
  double m = 0.0;
  for (double v : x) m += v;
  m /= static_cast<double>(x.size());
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return {m, s / static_cast<double>(x.size() - 1)};
}

}  // namespace

TEST_CASE("Cox variances and deviates", "[cox]") {
  const auto y = draw(LognormalParams{0.0, 1.0}, 100, 1);
  const CoxResult f = cox_lognormal_null(y);
  const CoxResult g = cox_weibull_null(y);
  CHECK(f.variance == 0.2183 * 100.0);
  CHECK(g.variance == 0.2834 * 100.0);
  CHECK(f.variance == Approx(21.83));
  CHECK(g.variance == Approx(28.34));
  CHECK(f.deviate == f.t_stat / std::sqrt(f.variance));
  CHECK(g.deviate == g.t_stat / std::sqrt(g.variance));
  CHECK(f.p_value == two_tailed_normal_p(f.deviate));
  CHECK(f.direction == CoxDirection::LognormalNull);
  CHECK(g.direction == CoxDirection::WeibullNull);
  CHECK(kEulerGamma4 == 0.5772);
  CHECK(kPiSquaredOverSix4 == 1.6449);
}

TEST_CASE("Cox statistics follow the closed forms", "[cox]") {
  const std::vector<double> y = {0.3, 0.9, 1.4, 2.2, 2.9, 4.1, 5.5, 8.0};
  const double n = static_cast<double>(y.size());
  double a1 = 0.0;
  for (double v : y) a1 += std::log(v);
  a1 /= n;
  double a2 = 0.0;
  for (double v : y) a2 += std::pow(std::log(v) - a1, 2);
  a2 /= n;
  const WeibullParams w = mle_weibull(y);
  const double b1 = w.beta1, b2 = w.beta2;

  const double b1a = std::exp(a1 + std::sqrt(a2) / 2.0);
  const double b2a = std::pow(a2, -0.5);
  const double tfg = n * (b2 * std::log(b1) - b2a * std::log(b1a) - std::log(b2) + std::log(b2a) -
                          a1 * (b2 - b2a));
  const double a1b = -0.5772 / b2 + std::log(b1);
  const double a2b = 1.6449 / (b2 * b2);
  const double tgf = n * (b2 * (a1 - a1b) + 0.5 * std::log(a2 / a2b));

  CHECK(cox_lognormal_null(y).t_stat == Approx(tfg).epsilon(1e-12));
  CHECK(cox_weibull_null(y).t_stat == Approx(tgf).epsilon(1e-12));
  CHECK(cox_lognormal_null(y).lognormal_fit.alpha2 == Approx(a2).epsilon(1e-14));
}

TEST_CASE("Cox deviates are scale invariant and deterministic", "[cox]") {
  for (std::uint64_t seed = 10; seed < 20; ++seed) {
    auto y = draw(WeibullParams{2.0, 1.4}, 60, seed);
    const CoxResult f1 = cox_lognormal_null(y), g1 = cox_weibull_null(y);
    const CoxResult f1b = cox_lognormal_null(y);
    CHECK(f1.deviate == f1b.deviate);
    CHECK(f1.t_stat == f1b.t_stat);
    for (double c : {1e-3, 7.5, 1e4}) {
      std::vector<double> z = y;
      for (double& v : z) v *= c;
      CHECK(std::abs(cox_lognormal_null(z).deviate - f1.deviate) <= 1e-8);
      CHECK(std::abs(cox_weibull_null(z).deviate - g1.deviate) <= 1e-8);
    }
  }
}

TEST_CASE("Cox test on degenerate data", "[cox]") {
  const std::vector<double> ones(10, 1.0);
  CHECK_THROWS_AS(cox_lognormal_null(ones), DegenerateDataError);
  CHECK_THROWS_AS(cox_weibull_null(ones), DegenerateDataError);
  CHECK_THROWS_AS(cox_weibull_null(std::vector<double>{1.0, -1.0, 2.0}), DomainError);
}

TEST_CASE("Cox acceptance of the true null over 50 replicates", "[cox][mc]") {
  int ln_ok = 0, w_ok = 0;
  for (std::uint64_t r = 0; r < 50; ++r) {
    if (!cox_rejects(cox_lognormal_null(draw(LognormalParams{0.0, 1.0}, 200, 100 + r)))) ++ln_ok;
    if (!cox_rejects(cox_weibull_null(draw(WeibullParams{1.0, 1.0}, 200, 200 + r)))) ++w_ok;
  }
  CHECK(ln_ok >= 45);  // at least 90%
  CHECK(w_ok >= 43);   // at least 85%
  CHECK_FALSE(cox_rejects(CoxResult{CoxDirection::LognormalNull, 0, 1, 1.95, 0.05, {}, {}}));
  CHECK(cox_rejects(CoxResult{CoxDirection::LognormalNull, 0, 1, -1.97, 0.05, {}, {}}));
}

TEST_CASE("Cox deviates are near standard normal under the null", "[cox][mc]") {
  std::vector<double> f, g;
  for (std::uint64_t r = 0; r < 200; ++r) {
    f.push_back(cox_lognormal_null(draw(LognormalParams{0.0, 1.0}, 200, 1000 + r)).deviate);
    g.push_back(cox_weibull_null(draw(WeibullParams{1.0, 1.0}, 200, 2000 + r)).deviate);
  }
  for (const auto& x : {f, g}) {
    const auto mv = mean_var(x);
    INFO("mean " << mv.mean << " var " << mv.var);
    CHECK(std::abs(mv.mean) <= 0.2);
    CHECK(mv.var >= 0.7);
    CHECK(mv.var <= 1.4);
  }
}
