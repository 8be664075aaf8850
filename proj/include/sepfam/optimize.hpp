#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <functional>

namespace sepfam {

using Objective = std::function<double(const Eigen::VectorXd&)>;

struct CgOptions {
  double tolerance = 1e-8;        // relative change in the objective
  std::size_t max_iterations = 500;
  double gradient_step = 1e-5;    // central-difference step, scaled per coordinate
};

struct CgResult {
  Eigen::VectorXd argmax;
  double value;
  std::size_t iterations;
  bool converged;
};

/// Central-difference gradient. Falls back to a one-sided difference when one
/// side of the stencil is not finite.
Eigen::VectorXd numeric_gradient(const Objective& f, const Eigen::VectorXd& x, double fx,
                                 double step);

/// Maximizes `f` by Fletcher-Reeves nonlinear conjugate gradients with a
/// backtracking/expanding line search. The search direction is reset to the
/// gradient every dim iterations and whenever it stops being an ascent
/// direction. Converged means a gradient-direction step could no longer
/// improve the objective by more than tolerance * (1 + |f|).
CgResult maximize_cg(const Objective& f, Eigen::VectorXd start, const CgOptions& options = {});

}  // namespace sepfam
