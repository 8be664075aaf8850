#pragma once

// Adaptive Metropolis random walk: the Gaussian proposal covariance is the
// running empirical covariance of the chain, scaled by 2.38^2 / d, plus a
// small ridge, once `adapt_start` iterations have elapsed.

#include <Eigen/Dense>
#include <cstddef>
#include <functional>
#include <vector>

#include "sepfam/numerics.hpp"

namespace sepfam {

struct AdaptiveMetropolisOptions {
  std::size_t iterations = 60000;
  std::size_t burn_in = 10000;
  std::size_t adapt_start = 2000;
  double initial_scale = 0.1;  // per-coordinate sd before adaptation
  double ridge = 1e-8;         // added to the diagonal of the adapted covariance
  std::size_t monitor_window = 5000;
  double min_acceptance = 0.01;
};

struct AdaptiveMetropolisResult {
  /// Post-burn-in states, one column per kept iteration.
  Eigen::MatrixXd states;
  /// Target log density at each kept state.
  std::vector<double> log_target;
  double acceptance_rate = 0.0;  // over kept iterations
  Eigen::MatrixXd final_covariance;
};

using LogTarget = std::function<double(const Eigen::VectorXd&)>;

/// Runs the chain from `start`. Throws ConvergenceError when the start is
/// outside the support or, after adaptation, the acceptance rate over a
/// monitoring window drops below `min_acceptance`.
AdaptiveMetropolisResult run_adaptive_metropolis(const LogTarget& target,
                                                 const Eigen::VectorXd& start,
                                                 const AdaptiveMetropolisOptions& options,
                                                 Rng& rng);

/// Effective sample size of a scalar trace by non-overlapping batch means.
double effective_sample_size(const std::vector<double>& trace);

}  // namespace sepfam
