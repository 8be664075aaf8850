#include "catch_amalgamated.hpp"

#include <cmath>
#include <limits>

#include "sepfam/optimize.hpp"

using namespace sepfam;
using Catch::Approx;

TEST_CASE("maximize_cg on a correlated quadratic", "[optimize]") {
  Eigen::Matrix3d a;
  a << 4.0, 1.0, 0.5,
       1.0, 3.0, 0.2,
       0.5, 0.2, 2.0;
  const Eigen::Vector3d b(1.0, -2.0, 0.5);
  const Objective f = [&](const Eigen::VectorXd& x) {
    return -0.5 * x.dot(a * x) + b.dot(x);
  };
  const Eigen::Vector3d exact = a.ldlt().solve(b);
  const CgResult r = maximize_cg(f, Eigen::Vector3d::Zero());
  CHECK(r.converged);
  CHECK((r.argmax - exact).norm() < 1e-4);
  CHECK(r.value == Approx(0.5 * b.dot(exact)).epsilon(1e-8));
}

TEST_CASE("maximize_cg on the Rosenbrock valley", "[optimize]") {
  const Objective f = [](const Eigen::VectorXd& x) {
    return -(100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2));
  };
  CgOptions opt;
  opt.max_iterations = 20000;
  opt.tolerance = 1e-12;
  const CgResult r = maximize_cg(f, Eigen::Vector2d(-1.2, 1.0), opt);
  CHECK(r.argmax[0] == Approx(1.0).margin(1e-2));
  CHECK(r.argmax[1] == Approx(1.0).margin(2e-2));
}

TEST_CASE("maximize_cg tolerates an infinite region", "[optimize]") {
  // Objective defined only for x > 0, peak at x = 2.
  const Objective f = [](const Eigen::VectorXd& x) {
    if (x[0] <= 0.0) return -std::numeric_limits<double>::infinity();
    return 2.0 * std::log(x[0]) - x[0];
  };
  Eigen::VectorXd start(1);
  start << 0.05;
  const CgResult r = maximize_cg(f, start);
  CHECK(r.converged);
  CHECK(r.argmax[0] == Approx(2.0).epsilon(1e-4));
}

TEST_CASE("numeric gradient", "[optimize]") {
  const Objective f = [](const Eigen::VectorXd& x) { return std::sin(x[0]) * std::exp(x[1]); };
  const Eigen::Vector2d x(0.3, -0.4);
  const Eigen::VectorXd g = numeric_gradient(f, x, f(x), 1e-5);
  CHECK(g[0] == Approx(std::cos(0.3) * std::exp(-0.4)).epsilon(1e-8));
  CHECK(g[1] == Approx(std::sin(0.3) * std::exp(-0.4)).epsilon(1e-8));
}
