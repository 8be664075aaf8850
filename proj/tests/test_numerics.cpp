#include "catch_amalgamated.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "sepfam/numerics.hpp"

using namespace sepfam;
using Catch::Approx;

TEST_CASE("log_gamma at known points", "[numerics]") {
  CHECK(log_gamma(1.0) == 0.0);
  CHECK(log_gamma(2.0) == 0.0);
  CHECK(log_gamma(0.5) == Approx(0.5 * std::log(std::numbers::pi)).epsilon(1e-14));
  CHECK(log_gamma(8.0) == Approx(std::log(5040.0)).epsilon(1e-14));
  CHECK(log_gamma(0.5) == Approx(0.5723649).margin(1e-7));
  CHECK(log_gamma(8.0) == Approx(8.5251614).margin(1e-7));
}

TEST_CASE("log_gamma agrees with the C library over [1e-6, 1e6]", "[numerics]") {
  for (double lx = -6.0; lx <= 6.0; lx += 0.01) {
    const double x = std::pow(10.0, lx);
    const double ref = std::lgamma(x);
    const double got = log_gamma(x);
    // Near the zeros at 1 and 2 compare absolutely.
    const double scale = std::max(std::abs(ref), 1.0);
    INFO("x = " << x);
    CHECK(std::abs(got - ref) <= 1e-12 * scale);
  }
}

TEST_CASE("log_gamma recurrence", "[numerics]") {
  for (double x : {1e-5, 0.1, 0.7, 1.3, 3.0, 14.9, 15.1, 40.0, 1234.5}) {
    const double lhs = log_gamma(x + 1.0);
    const double rhs = log_gamma(x) + std::log(x);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)));
  }
}

TEST_CASE("log_gamma rejects bad arguments", "[numerics]") {
  CHECK_THROWS_AS(log_gamma(0.0), DomainError);
  CHECK_THROWS_AS(log_gamma(-1.0), DomainError);
  CHECK_THROWS_AS(log_gamma(std::nan("")), DomainError);
  CHECK_THROWS_AS(log_gamma(INFINITY), DomainError);
}

TEST_CASE("digamma matches a difference of log_gamma", "[numerics]") {
  for (double x : {0.05, 0.5, 1.0, 2.5, 10.0, 200.0}) {
    const double h = 1e-5 * x;
    const double fd = (std::lgamma(x + h) - std::lgamma(x - h)) / (2.0 * h);
    CHECK(digamma(x) == Approx(fd).epsilon(1e-7));
  }
  CHECK(digamma(1.0) == Approx(-0.57721566490153286).epsilon(1e-14));
}

TEST_CASE("chi-square cdf and quantile", "[numerics]") {
  CHECK(chi2_cdf(0.0, 3.0) == 0.0);
  CHECK(chi2_quantile(0.5, 2.0) == Approx(2.0 * std::log(2.0)).epsilon(1e-12));
  CHECK(chi2_quantile(0.5, 2.0) == Approx(1.386294).margin(1e-6));
  // Exp(1/2) closed form for two degrees of freedom.
  for (double x : {0.1, 1.0, 5.0, 20.0}) CHECK(chi2_cdf(x, 2.0) == Approx(1.0 - std::exp(-x / 2)));
  // t = 3, h = 2: the inner quantile has t - h = 1 degree of freedom.
  CHECK(chi2_cdf(chi2_quantile(0.95, 1.0), 3.0) == Approx(0.72).margin(0.005));

  CHECK_THROWS_AS(chi2_quantile(0.0, 2.0), DomainError);
  CHECK_THROWS_AS(chi2_quantile(1.0, 2.0), DomainError);
  CHECK_THROWS_AS(chi2_quantile(0.5, 0.0), DomainError);
  CHECK_THROWS_AS(chi2_cdf(1.0, -1.0), DomainError);
}

TEST_CASE("chi-square quantile inverts the cdf", "[numerics]") {
  for (double df : {1.0, 2.0, 3.0, 5.0}) {
    for (double x = 0.01; x <= 30.0; x += 0.05) {
      const double back = chi2_quantile(chi2_cdf(x, df), df);
      INFO("df = " << df << ", x = " << x);
      CHECK(std::abs(back - x) <= 1e-8 * x);
    }
  }
}

TEST_CASE("incomplete gamma halves add to one", "[numerics]") {
  for (double a : {0.01, 0.5, 1.0, 2.5, 8.0, 50.0}) {
    for (double x : {1e-3, 0.5, 1.0, 3.0, 10.0, 80.0}) {
      CHECK(gamma_p(a, x) + gamma_q(a, x) == Approx(1.0).margin(1e-14));
    }
  }
  // Q(1, x) = exp(-x) keeps relative accuracy deep in the tail.
  CHECK(gamma_q(1.0, 200.0) == Approx(std::exp(-200.0)).epsilon(1e-12));
}

TEST_CASE("standard normal cdf", "[numerics]") {
  CHECK(std_normal_cdf(0.0) == 0.5);
  CHECK(std_normal_cdf(1.96) == Approx(0.975).margin(5e-5));
  CHECK(two_tailed_normal_p(-3.048) == Approx(0.002).margin(5e-4));
  for (double z = -8.0; z <= 8.0; z += 0.125) {
    CHECK(std::abs(std_normal_cdf(z) + std_normal_cdf(-z) - 1.0) <= 1e-12);
  }
  CHECK_THROWS_AS(std_normal_cdf(INFINITY), DomainError);
  CHECK_THROWS_AS(std_normal_cdf(std::nan("")), DomainError);
}

TEST_CASE("solve_scalar_root", "[numerics]") {
  const auto f = [](double x) { return x * x - 4.0; };
  const auto df = [](double x) { return 2.0 * x; };
  CHECK(solve_scalar_root(f, df, {0.0, 10.0}, 1e-12) == Approx(2.0).epsilon(1e-12));

  SECTION("Weibull shape equation for an exponential") {
    const auto r = [](double b) {
      return 2.0 * std::lgamma(1.0 + 1.0 / b) - std::lgamma(1.0 + 2.0 / b) + std::log(2.0);
    };
    const auto dr = [](double b) {
      return (-2.0 * digamma(1.0 + 1.0 / b) + 2.0 * digamma(1.0 + 2.0 / b)) / (b * b);
    };
    CHECK(solve_scalar_root(r, dr, {1e-3, 1e3}, 1e-13) == Approx(1.0).epsilon(1e-10));
  }

  SECTION("iterates stay inside the bracket") {
    // Newton from the right would jump far left of the bracket.
    std::vector<double> seen;
    const auto g = [&](double x) {
      seen.push_back(x);
      return std::atan(x - 0.3);
    };
    const auto dg = [](double x) { return 1.0 / (1.0 + (x - 0.3) * (x - 0.3)); };
    const double root = solve_scalar_root(g, dg, {-1.0, 50.0}, 1e-12);
    CHECK(root == Approx(0.3).margin(1e-10));
    for (double x : seen) {
      CHECK(x >= -1.0);
      CHECK(x <= 50.0);
    }
  }

  SECTION("no root") {
    const auto g = [](double x) { return x * x + 1.0; };
    const auto dg = [](double x) { return 2.0 * x; };
    CHECK_THROWS_AS(solve_scalar_root(g, dg, {-3.0, 5.0}, 1e-10), NoRootError);
  }
}

TEST_CASE("random streams are reproducible and distinct", "[numerics]") {
  Rng a = make_stream(42, 7);
  Rng b = make_stream(42, 7);
  Rng c = make_stream(42, 8);
  for (int i = 0; i < 10; ++i) {
    const auto x = a();
    CHECK(x == b());
    CHECK(x != c());
  }
  CHECK(stream_seed(1, 0) != stream_seed(0, 1));
}

namespace {

struct Moments {
  double mean;
  double var;
};

template <class Draw>
Moments sample_moments(Draw&& draw, std::size_t n) {
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = draw();
    sum += x;
    sum2 += x * x;
  }
  const double mean = sum / static_cast<double>(n);
  return {mean, sum2 / static_cast<double>(n) - mean * mean};
}

}  // namespace

TEST_CASE("sampler moments over 1e6 draws", "[numerics]") {
  constexpr std::size_t n = 1'000'000;
  Rng rng = make_stream(2024, 0);

  const auto ln = sample_moments([&] { return sample_lognormal(0.0, 1.0, rng); }, n);
  CHECK(ln.mean == Approx(std::exp(0.5)).epsilon(0.01));
  CHECK(ln.var == Approx((std::exp(1.0) - 1.0) * std::exp(1.0)).epsilon(0.01));

  const auto w = sample_moments([&] { return sample_weibull(1.0, 1.0, rng); }, n);
  CHECK(w.mean == Approx(1.0).epsilon(0.01));
  CHECK(w.var == Approx(1.0).epsilon(0.01));

  const auto g = sample_moments([&] { return sample_gamma(2.5, 8.0, rng); }, n);
  CHECK(g.mean == Approx(20.0).epsilon(0.01));
  CHECK(g.var == Approx(50.0).epsilon(0.01));

  CHECK_THROWS_AS(sample_gamma(-1.0, 2.0, rng), DomainError);
  CHECK_THROWS_AS(sample_weibull(1.0, 0.0, rng), DomainError);
  CHECK_THROWS_AS(sample_lognormal(0.0, -1.0, rng), DomainError);
}
