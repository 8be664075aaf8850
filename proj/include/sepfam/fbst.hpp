#pragma once

// Full Bayesian Significance Test for sharp hypotheses on mixture weights.
//
// For a hypothesis H the engine finds q* = sup_H of the posterior density,
// samples the full posterior by adaptive Metropolis and estimates the
// posterior mass of the tangential set {theta : q(theta | y) > q*} by the
// fraction of chain states above q*. That mass is the evidence against H;
// one minus it is the e-value.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sepfam/errors.hpp"
#include "sepfam/mixture.hpp"

namespace sepfam {

struct Hypothesis {
  enum class Kind { WeightIsOne, WeightIsZero };
  Kind kind;
  std::size_t component;

  static Hypothesis weight_is_one(std::size_t k) { return {Kind::WeightIsOne, k}; }
  static Hypothesis weight_is_zero(std::size_t k) { return {Kind::WeightIsZero, k}; }
  friend bool operator==(const Hypothesis&, const Hypothesis&) = default;
};

/// "p_lognormal=1" style label.
std::string describe(const MixtureSpec& spec, const Hypothesis& h);

/// p_k = 0 and p_k = 1 for every component, ordered (k=0: zero, one), (k=1: ...).
std::vector<Hypothesis> all_weight_hypotheses(const MixtureSpec& spec);

struct FbstConfig {
  std::size_t chain_length = 60000;
  std::size_t burn_in = 10000;
  std::size_t adapt_start = 2000;
  double initial_proposal_scale = 0.1;
  std::size_t optimizer_restarts = 5;
  double optimizer_tol = 1e-8;
  double significance = 0.05;
  std::uint64_t seed = 20240611;
};

void validate(const FbstConfig& config);

enum class Verdict { Accept, Reject };

struct ChainDiagnostics {
  double acceptance_rate = 0.0;
  double effective_sample_size = 0.0;
  std::size_t kept = 0;
};

struct EvidenceResult {
  Hypothesis hypothesis;
  double e_value;
  double ev_against;
  double p_value;
  double threshold_c;
  std::size_t t;  // dimension of the full parameter space
  std::size_t h;  // dimension of the hypothesis set
  double q_star;  // sup of the unnormalized log posterior under H
  MixtureState argmax;
  Verdict verdict;
  ChainDiagnostics diagnostics;
};

struct SupremumResult {
  double q_star;
  MixtureState argmax;
  std::size_t converged_restarts;
};

/// Thrown when no optimizer restart converged; carries the best point seen.
class SupremumError : public ConvergenceError {
 public:
  SupremumError(const std::string& what, double best_value, MixtureState best)
      : ConvergenceError(what), best_value_(best_value), best_(std::move(best)) {}
  double best_value() const { return best_value_; }
  const MixtureState& best() const { return best_; }

 private:
  double best_value_;
  MixtureState best_;
};

void validate(const MixtureSpec& spec, const Hypothesis& h);

/// (t, h): t = 2 + (m - 1); h = 2 under p_k = 1 and 2 + (m - 2) under p_k = 0.
std::pair<std::size_t, std::size_t> test_dimensions(const MixtureSpec& spec, const Hypothesis& h);

/// Supremum of the full-model log posterior over the closed hypothesis set.
/// p_k = 1 reduces to a single-family problem in (mu, sigma2); p_k = 0 is the
/// mixture of the remaining components, including every face of its simplex.
/// Each face is maximized by multi-start conjugate gradients.
SupremumResult constrained_supremum(const MixtureSpec& spec, const Hypothesis& h,
                                    const Dataset& data, const FbstConfig& config);

struct PosteriorChain {
  std::vector<MixtureState> states;
  std::vector<double> log_posterior;  // in (mu, sigma2, p) coordinates
  ChainDiagnostics diagnostics;
};

/// Adaptive Metropolis over the working coordinates of the full mixture,
/// started from the moment-matched point with equal weights.
PosteriorChain run_chain(const MixtureSpec& spec, const Dataset& data, const FbstConfig& config);

/// Fraction of `log_posterior` values strictly above `q_star`.
double tangential_mass(std::span<const double> log_posterior, double q_star);

/// c = F_t(F_{t-h}^{-1}(1 - significance)).
double fbst_threshold(std::size_t t, std::size_t h, double significance);

/// p = 1 - F_{t-h}(F_t^{-1}(ev_against)); endpoints map 0 -> 1 and 1 -> 0.
double evidence_pvalue(double ev_against, std::size_t t, std::size_t h);

/// Assembles a result from a chain and a precomputed supremum.
EvidenceResult evidence_from_chain(const MixtureSpec& spec, const Hypothesis& h,
                                   const PosteriorChain& chain, const SupremumResult& sup,
                                   const FbstConfig& config);

EvidenceResult e_value(const MixtureSpec& spec, const Hypothesis& h, const Dataset& data,
                       const FbstConfig& config);

/// Evaluates several hypotheses against one shared posterior chain. Face
/// optima are computed once and reused across hypotheses.
std::vector<EvidenceResult> evaluate_hypotheses(const MixtureSpec& spec,
                                                std::span<const Hypothesis> hypotheses,
                                                const Dataset& data, const FbstConfig& config,
                                                PosteriorChain* chain_out = nullptr);

}  // namespace sepfam
