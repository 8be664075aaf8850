#include "sepfam/metropolis.hpp"

#include <cmath>
#include <random>
#include <string>

#include "sepfam/errors.hpp"

namespace sepfam {

AdaptiveMetropolisResult run_adaptive_metropolis(const LogTarget& target,
                                                 const Eigen::VectorXd& start,
                                                 const AdaptiveMetropolisOptions& options,
                                                 Rng& rng) {
  if (options.burn_in >= options.iterations) {
    throw DomainError("adaptive Metropolis: burn-in must be shorter than the chain");
  }
  if (options.adapt_start < 1) throw DomainError("adaptive Metropolis: adapt_start must be >= 1");
  if (!(options.initial_scale > 0.0)) {
    throw DomainError("adaptive Metropolis: initial scale must be positive");
  }
  const Eigen::Index d = start.size();
  const double sd_scale = 2.38 * 2.38 / static_cast<double>(d);

  Eigen::VectorXd x = start;
  double fx = target(x);
  if (!std::isfinite(fx)) {
    throw ConvergenceError("adaptive Metropolis: start point has zero target density");
  }

  Eigen::MatrixXd chol = Eigen::MatrixXd::Identity(d, d) * options.initial_scale;
  Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(d, d) * options.initial_scale * options.initial_scale;

  // Running mean and scatter of every visited state (Welford).
  Eigen::VectorXd mean = x;
  Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(d, d);
  double count = 1.0;

  const std::size_t kept = options.iterations - options.burn_in;
  AdaptiveMetropolisResult result;
  result.states.resize(d, static_cast<Eigen::Index>(kept));
  result.log_target.reserve(kept);

  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  Eigen::VectorXd z(d);
  std::size_t accepted_kept = 0;
  std::size_t window_accepts = 0;
  std::size_t window_count = 0;

  for (std::size_t it = 1; it <= options.iterations; ++it) {
    for (Eigen::Index i = 0; i < d; ++i) z[i] = normal(rng);
    const Eigen::VectorXd proposal = x + chol.triangularView<Eigen::Lower>() * z;
    const double fp = target(proposal);
    bool accept = false;
    if (std::isfinite(fp)) {
      const double log_ratio = fp - fx;
      accept = log_ratio >= 0.0 || std::log(uniform(rng)) < log_ratio;
    }
    if (accept) {
      x = proposal;
      fx = fp;
    }

    count += 1.0;
    const Eigen::VectorXd delta = x - mean;
    mean += delta / count;
    scatter += delta * (x - mean).transpose();

    if (it >= options.adapt_start) {
      cov = sd_scale * (scatter / (count - 1.0));
      cov.diagonal().array() += sd_scale * options.ridge;
      Eigen::LLT<Eigen::MatrixXd> llt(cov);
      if (llt.info() == Eigen::Success) chol = llt.matrixL();
      ++window_count;
      if (accept) ++window_accepts;
      if (window_count == options.monitor_window) {
        const double rate = static_cast<double>(window_accepts) / static_cast<double>(window_count);
        if (rate < options.min_acceptance) {
          throw ConvergenceError("adaptive Metropolis: acceptance rate " + std::to_string(rate) +
                                 " below threshold; chain is degenerate");
        }
        window_accepts = window_count = 0;
      }
    }

    if (it > options.burn_in) {
      const auto col = static_cast<Eigen::Index>(it - options.burn_in - 1);
      result.states.col(col) = x;
      result.log_target.push_back(fx);
      if (accept) ++accepted_kept;
    }
  }
  result.acceptance_rate = static_cast<double>(accepted_kept) / static_cast<double>(kept);
  result.final_covariance = cov;
  return result;
}

double effective_sample_size(const std::vector<double>& trace) {
  const std::size_t n = trace.size();
  if (n < 4) return static_cast<double>(n);
  const auto batch = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n))));
  const std::size_t batches = n / batch;
  double mean = 0.0;
  for (double v : trace) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : trace) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n - 1);
  if (var == 0.0) return static_cast<double>(n);
  double bvar = 0.0;
  for (std::size_t b = 0; b < batches; ++b) {
    double bm = 0.0;
    for (std::size_t i = b * batch; i < (b + 1) * batch; ++i) bm += trace[i];
    bm /= static_cast<double>(batch);
    bvar += (bm - mean) * (bm - mean);
  }
  bvar /= static_cast<double>(batches - 1);
  if (bvar == 0.0) return static_cast<double>(n);
  const double ess = static_cast<double>(n) * var / (static_cast<double>(batch) * bvar);
  return std::min(ess, static_cast<double>(n));
}

}  // namespace sepfam
