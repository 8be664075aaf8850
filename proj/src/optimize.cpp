#include "sepfam/optimize.hpp"

#include <cmath>
#include <limits>

#include "sepfam/errors.hpp"

namespace sepfam {

namespace {

struct LineResult {
  double step;
  double value;
};

// Armijo backtracking from `initial`, then doubling while the objective keeps
// increasing. Returns step 0 when no improving step exists along `dir`.
LineResult line_search(const Objective& f, const Eigen::VectorXd& x, double fx,
                       const Eigen::VectorXd& dir, double slope, double initial) {
  constexpr double kArmijo = 1e-4;
  constexpr int kMaxHalvings = 60;
  constexpr int kMaxDoublings = 30;
  double t = initial;
  double ft = f(x + t * dir);
  int halvings = 0;
  while (!(std::isfinite(ft) && ft >= fx + kArmijo * t * slope)) {
    t *= 0.5;
    if (++halvings > kMaxHalvings) return {0.0, fx};
    ft = f(x + t * dir);
  }
  if (halvings == 0) {
    for (int i = 0; i < kMaxDoublings; ++i) {
      const double t2 = 2.0 * t;
      const double f2 = f(x + t2 * dir);
      if (!(std::isfinite(f2) && f2 > ft)) break;
      t = t2;
      ft = f2;
    }
  }
  return {t, ft};
}

}  // namespace

Eigen::VectorXd numeric_gradient(const Objective& f, const Eigen::VectorXd& x, double fx,
                                 double step) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = step * std::max(1.0, std::abs(x[i]));
    probe[i] = x[i] + h;
    const double fp = f(probe);
    probe[i] = x[i] - h;
    const double fm = f(probe);
    probe[i] = x[i];
    if (std::isfinite(fp) && std::isfinite(fm)) {
      g[i] = (fp - fm) / (2.0 * h);
    } else if (std::isfinite(fp)) {
      g[i] = (fp - fx) / h;
    } else if (std::isfinite(fm)) {
      g[i] = (fx - fm) / h;
    } else {
      g[i] = 0.0;
    }
  }
  return g;
}

CgResult maximize_cg(const Objective& f, Eigen::VectorXd start, const CgOptions& options) {
  Eigen::VectorXd x = std::move(start);
  double fx = f(x);
  if (!std::isfinite(fx)) {
    throw DomainError("maximize_cg: objective is not finite at the starting point");
  }
  const auto dim = static_cast<std::size_t>(x.size());
  Eigen::VectorXd g = numeric_gradient(f, x, fx, options.gradient_step);
  Eigen::VectorXd dir = g;
  double step = 1.0 / std::max(1.0, g.norm());
  std::size_t since_reset = 0;
  bool fresh_direction = true;

  for (std::size_t iter = 1; iter <= options.max_iterations; ++iter) {
    double slope = g.dot(dir);
    if (!(slope > 0.0)) {
      dir = g;
      slope = g.squaredNorm();
      fresh_direction = true;
      since_reset = 0;
    }
    if (slope == 0.0) return {x, fx, iter, true};

    const LineResult ls = line_search(f, x, fx, dir, slope, step);
    const double gain = ls.value - fx;
    if (ls.step > 0.0) {
      x += ls.step * dir;
      fx = ls.value;
      step = ls.step;
    }
    if (gain <= options.tolerance * (1.0 + std::abs(fx))) {
      if (fresh_direction) return {x, fx, iter, true};
      // Conjugate direction stalled: retry along the gradient.
      g = numeric_gradient(f, x, fx, options.gradient_step);
      dir = g;
      fresh_direction = true;
      since_reset = 0;
      step = 1.0 / std::max(1.0, g.norm());
      continue;
    }

    const Eigen::VectorXd g_new = numeric_gradient(f, x, fx, options.gradient_step);
    const double denom = g.squaredNorm();
    const double beta = denom > 0.0 ? g_new.squaredNorm() / denom : 0.0;
    g = g_new;
    if (++since_reset >= dim) {
      dir = g;
      since_reset = 0;
      fresh_direction = true;
    } else {
      dir = g + beta * dir;
      fresh_direction = false;
    }
  }
  return {x, fx, options.max_iterations, false};
}

}  // namespace sepfam
