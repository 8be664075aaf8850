#pragma once

// Common-parameter mixture of separate families: every component shares the
// population mean and variance, and only the weights distinguish them.

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "sepfam/families.hpp"

namespace sepfam {

/// Observations with their logarithms cached for repeated likelihood sweeps.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(std::vector<double> values);

  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  std::span<const double> values() const { return values_; }
  std::span<const double> logs() const { return logs_; }
  double mean() const;
  /// Sample variance with divisor n.
  double variance() const;

 private:
  std::vector<double> values_;
  std::vector<double> logs_;
};

/// Gamma(shape, scale) prior; mean shape*scale, variance shape*scale^2.
struct GammaPrior {
  double shape = 0.01;
  double scale = 100.0;
  double logpdf(double x) const;
};

struct MixtureSpec {
  std::vector<FamilyId> components;
  GammaPrior prior_mu;
  GammaPrior prior_sigma2;
  std::vector<double> concentration;  // Dirichlet, one per component

  std::size_t size() const { return components.size(); }
  /// Dimension of the full parameter space: (mu, sigma2) plus m - 1 weights.
  std::size_t dimension() const { return 2 + components.size() - 1; }

  /// Default priors: gamma(0.01, 100) on both common parameters and a flat
  /// Dirichlet on the weights.
  static MixtureSpec with_defaults(std::vector<FamilyId> components);
};

/// Throws DomainError unless the spec has at least `min_components`
/// components, valid gamma priors and concentrations >= 1 (smaller
/// concentrations make the density unbounded on the simplex boundary).
void validate(const MixtureSpec& spec, std::size_t min_components = 2);

struct MixtureState {
  CommonParams cp;
  std::vector<double> weights;
};

void validate(const MixtureSpec& spec, const MixtureState& state);

/// Unconstrained coordinates: (ln mu, ln sigma2, z_1, ..., z_{m-1}) with a
/// stick-breaking map for the weights. All-zero logits give equal weights.
using WorkingPoint = Eigen::VectorXd;

WorkingPoint to_working(const MixtureSpec& spec, const MixtureState& state);
MixtureState from_working(const MixtureSpec& spec, const WorkingPoint& point);

/// ln |d(mu, sigma2, p_1..p_{m-1}) / d(working point)|.
double log_jacobian(const MixtureSpec& spec, const WorkingPoint& point);

/// Sum over observations of ln sum_k p_k f_k(y | mu, sigma2). Components with
/// zero weight are skipped; returns -inf when the mixture density vanishes
/// at some observation or a positive-weight component cannot be
/// parametrized.
double loglik(const MixtureSpec& spec, const MixtureState& state, const Dataset& data);

double logprior(const MixtureSpec& spec, const MixtureState& state);

/// Unnormalized log posterior density in (mu, sigma2, p) coordinates.
double logposterior(const MixtureSpec& spec, const MixtureState& state, const Dataset& data);

/// Log density of the working-space image of the posterior (includes the
/// Jacobian); this is what the sampler targets.
double logposterior_working(const MixtureSpec& spec, const WorkingPoint& point,
                            const Dataset& data);

/// Mixture density at a single point.
double mixture_pdf(const MixtureSpec& spec, const MixtureState& state, double y);

}  // namespace sepfam
