#include "sepfam/fbst.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <random>

#include "sepfam/metropolis.hpp"
#include "sepfam/optimize.hpp"

namespace sepfam {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::uint64_t kOptimizerStreamBase = 1000;

using Mask = unsigned;

std::vector<std::size_t> members(Mask mask, std::size_t m) {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < m; ++k) {
    if (mask & (1u << k)) out.push_back(k);
  }
  return out;
}

MixtureSpec restrict_spec(const MixtureSpec& spec, const std::vector<std::size_t>& support) {
  MixtureSpec sub;
  sub.prior_mu = spec.prior_mu;
  sub.prior_sigma2 = spec.prior_sigma2;
  for (std::size_t k : support) {
    sub.components.push_back(spec.components[k]);
    sub.concentration.push_back(spec.concentration[k]);
  }
  return sub;
}

MixtureState embed(const MixtureSpec& spec, const std::vector<std::size_t>& support,
                   const MixtureState& sub_state) {
  MixtureState full{sub_state.cp, std::vector<double>(spec.size(), 0.0)};
  for (std::size_t i = 0; i < support.size(); ++i) full.weights[support[i]] = sub_state.weights[i];
  return full;
}

CommonParams moment_start(const Dataset& data) {
  if (data.size() < 2) return {data.empty() ? 1.0 : data.mean(), 1.0};
  const double var = data.variance();
  const double mean = data.mean();
  return {mean, var > 0.0 ? var : mean * mean};
}

// Interior optimum of the posterior restricted to the open face spanned by
// `support` (all other weights exactly zero).
SupremumResult optimize_face(const MixtureSpec& spec, Mask mask, const Dataset& data,
                             const FbstConfig& config) {
  const auto support = members(mask, spec.size());
  const MixtureSpec sub = restrict_spec(spec, support);
  const Objective objective = [&](const Eigen::VectorXd& w) {
    if (!w.allFinite()) return kNegInf;
    const MixtureState s = embed(spec, support, from_working(sub, w));
    if (!(s.cp.mu > 0.0) || !(s.cp.sigma2 > 0.0) || !std::isfinite(s.cp.mu) ||
        !std::isfinite(s.cp.sigma2)) {
      return kNegInf;
    }
    return logposterior(spec, s, data);
  };

  MixtureState base{moment_start(data),
                    std::vector<double>(sub.size(), 1.0 / static_cast<double>(sub.size()))};
  const Eigen::VectorXd start = to_working(sub, base);
  Rng rng = make_stream(config.seed, kOptimizerStreamBase + mask);
  std::normal_distribution<double> normal(0.0, 1.0);

  CgOptions options;
  options.tolerance = config.optimizer_tol;

  double best_value = kNegInf;
  Eigen::VectorXd best_point = start;
  std::size_t converged = 0;
  const std::size_t restarts = std::max<std::size_t>(1, config.optimizer_restarts);
  for (std::size_t r = 0; r < restarts; ++r) {
    Eigen::VectorXd x0 = start;
    if (r > 0) {
      x0[0] += 0.1 * normal(rng);
      x0[1] += 0.3 * normal(rng);
      for (Eigen::Index i = 2; i < x0.size(); ++i) x0[i] += normal(rng);
    }
    if (!std::isfinite(objective(x0))) continue;
    const CgResult res = maximize_cg(objective, x0, options);
    if (res.converged) ++converged;
    if (res.value > best_value) {
      best_value = res.value;
      best_point = res.argmax;
    }
  }
  MixtureState best = embed(spec, support, from_working(sub, best_point));
  if (converged == 0) {
    throw SupremumError("constrained supremum: no optimizer restart converged", best_value,
                        std::move(best));
  }
  return {best_value, std::move(best), converged};
}

// Supremum over the closed face: the best interior optimum over every
// non-empty sub-face. A face whose optimum lies on its own boundary never
// converges (a weight drifts to zero); that is harmless as long as some
// converged sub-face is at least as high.
SupremumResult face_supremum(const MixtureSpec& spec, Mask mask, const Dataset& data,
                             const FbstConfig& config, std::map<Mask, SupremumResult>& cache) {
  std::optional<SupremumResult> best, best_converged;
  for (Mask sub = mask; sub != 0; sub = (sub - 1) & mask) {
    auto it = cache.find(sub);
    if (it == cache.end()) {
      SupremumResult r;
      try {
        r = optimize_face(spec, sub, data, config);
      } catch (const SupremumError& e) {
        r = {e.best_value(), e.best(), 0};
      }
      it = cache.emplace(sub, std::move(r)).first;
    }
    const SupremumResult& r = it->second;
    if (!best || r.q_star > best->q_star) best = r;
    if (r.converged_restarts > 0 && (!best_converged || r.q_star > best_converged->q_star)) {
      best_converged = r;
    }
  }
  if (best->converged_restarts > 0) return *best;
  if (best_converged &&
      best->q_star <= best_converged->q_star +
                          config.optimizer_tol * (1.0 + std::abs(best_converged->q_star))) {
    return *best_converged;
  }
  throw SupremumError("constrained supremum: no optimizer restart converged", best->q_star,
                      best->argmax);
}

Mask hypothesis_mask(const MixtureSpec& spec, const Hypothesis& h) {
  const Mask all = (1u << spec.size()) - 1u;
  const Mask bit = 1u << h.component;
  return h.kind == Hypothesis::Kind::WeightIsOne ? bit : (all & ~bit);
}

}  // namespace

std::string describe(const MixtureSpec& spec, const Hypothesis& h) {
  return "p_" + std::string(family_name(spec.components.at(h.component))) +
         (h.kind == Hypothesis::Kind::WeightIsOne ? "=1" : "=0");
}

std::vector<Hypothesis> all_weight_hypotheses(const MixtureSpec& spec) {
  std::vector<Hypothesis> out;
  for (std::size_t k = 0; k < spec.size(); ++k) {
    out.push_back(Hypothesis::weight_is_zero(k));
    out.push_back(Hypothesis::weight_is_one(k));
  }
  return out;
}

void validate(const FbstConfig& config) {
  if (config.burn_in >= config.chain_length) {
    throw DomainError("FBST config: burn_in must be smaller than chain_length");
  }
  if (config.adapt_start < 1) throw DomainError("FBST config: adapt_start must be >= 1");
  if (!(config.significance > 0.0 && config.significance < 1.0)) {
    throw DomainError("FBST config: significance must lie in (0, 1)");
  }
  if (!(config.initial_proposal_scale > 0.0)) {
    throw DomainError("FBST config: initial proposal scale must be positive");
  }
  if (!(config.optimizer_tol > 0.0)) throw DomainError("FBST config: optimizer_tol must be positive");
}

void validate(const MixtureSpec& spec, const Hypothesis& h) {
  validate(spec);
  if (h.component >= spec.size()) throw DomainError("hypothesis refers to a missing component");
}

std::pair<std::size_t, std::size_t> test_dimensions(const MixtureSpec& spec, const Hypothesis& h) {
  validate(spec, h);
  const std::size_t m = spec.size();
  const std::size_t t = 2 + (m - 1);
  const std::size_t dim_h = h.kind == Hypothesis::Kind::WeightIsOne ? 2 : 2 + (m - 2);
  return {t, dim_h};
}

SupremumResult constrained_supremum(const MixtureSpec& spec, const Hypothesis& h,
                                    const Dataset& data, const FbstConfig& config) {
  validate(spec, h);
  validate(config);
  std::map<Mask, SupremumResult> cache;
  return face_supremum(spec, hypothesis_mask(spec, h), data, config, cache);
}

PosteriorChain run_chain(const MixtureSpec& spec, const Dataset& data, const FbstConfig& config) {
  validate(spec);
  validate(config);
  const MixtureState start_state{
      moment_start(data), std::vector<double>(spec.size(), 1.0 / static_cast<double>(spec.size()))};
  const Eigen::VectorXd start = to_working(spec, start_state);

  AdaptiveMetropolisOptions options;
  options.iterations = config.chain_length;
  options.burn_in = config.burn_in;
  options.adapt_start = config.adapt_start;
  options.initial_scale = config.initial_proposal_scale;
  options.monitor_window =
      config.chain_length > config.adapt_start
          ? std::min<std::size_t>(5000, config.chain_length - config.adapt_start)
          : 5000;

  Rng rng = make_stream(config.seed, 0);
  const LogTarget target = [&](const Eigen::VectorXd& w) {
    return logposterior_working(spec, w, data);
  };
  const AdaptiveMetropolisResult am = run_adaptive_metropolis(target, start, options, rng);

  PosteriorChain chain;
  const auto kept = static_cast<std::size_t>(am.states.cols());
  chain.states.reserve(kept);
  chain.log_posterior.reserve(kept);
  for (std::size_t i = 0; i < kept; ++i) {
    const Eigen::VectorXd w = am.states.col(static_cast<Eigen::Index>(i));
    chain.states.push_back(from_working(spec, w));
    chain.log_posterior.push_back(am.log_target[i] - log_jacobian(spec, w));
  }
  chain.diagnostics.acceptance_rate = am.acceptance_rate;
  chain.diagnostics.effective_sample_size = effective_sample_size(chain.log_posterior);
  chain.diagnostics.kept = kept;
  return chain;
}

double tangential_mass(std::span<const double> log_posterior, double q_star) {
  if (log_posterior.empty()) throw DomainError("tangential_mass: empty chain");
  const auto above = std::count_if(log_posterior.begin(), log_posterior.end(),
                                   [q_star](double v) { return v > q_star; });
  return static_cast<double>(above) / static_cast<double>(log_posterior.size());
}

double fbst_threshold(std::size_t t, std::size_t h, double significance) {
  if (h >= t) throw DomainError("fbst_threshold: need h < t");
  if (!(significance > 0.0 && significance < 1.0)) {
    throw DomainError("fbst_threshold: significance must lie in (0, 1)");
  }
  return chi2_cdf(chi2_quantile(1.0 - significance, static_cast<double>(t - h)),
                  static_cast<double>(t));
}

double evidence_pvalue(double ev_against, std::size_t t, std::size_t h) {
  if (!(ev_against >= 0.0 && ev_against <= 1.0)) {
    throw DomainError("evidence_pvalue: evidence must lie in [0, 1]");
  }
  if (h >= t) throw DomainError("evidence_pvalue: need h < t");
  if (ev_against == 0.0) return 1.0;
  if (ev_against == 1.0) return 0.0;
  const double x = chi2_quantile(ev_against, static_cast<double>(t));
  return 1.0 - chi2_cdf(x, static_cast<double>(t - h));
}

EvidenceResult evidence_from_chain(const MixtureSpec& spec, const Hypothesis& h,
                                   const PosteriorChain& chain, const SupremumResult& sup,
                                   const FbstConfig& config) {
  const auto [t, dim_h] = test_dimensions(spec, h);
  EvidenceResult r{};
  r.hypothesis = h;
  r.ev_against = tangential_mass(chain.log_posterior, sup.q_star);
  r.e_value = 1.0 - r.ev_against;
  r.t = t;
  r.h = dim_h;
  r.threshold_c = fbst_threshold(t, dim_h, config.significance);
  r.p_value = evidence_pvalue(r.ev_against, t, dim_h);
  r.q_star = sup.q_star;
  r.argmax = sup.argmax;
  r.verdict = r.ev_against > r.threshold_c ? Verdict::Reject : Verdict::Accept;
  r.diagnostics = chain.diagnostics;
  return r;
}

EvidenceResult e_value(const MixtureSpec& spec, const Hypothesis& h, const Dataset& data,
                       const FbstConfig& config) {
  const Hypothesis hs[] = {h};
  return evaluate_hypotheses(spec, hs, data, config).front();
}

std::vector<EvidenceResult> evaluate_hypotheses(const MixtureSpec& spec,
                                                std::span<const Hypothesis> hypotheses,
                                                const Dataset& data, const FbstConfig& config,
                                                PosteriorChain* chain_out) {
  validate(spec);
  validate(config);
  for (const auto& h : hypotheses) validate(spec, h);
  PosteriorChain chain = run_chain(spec, data, config);
  std::map<Mask, SupremumResult> cache;
  std::vector<EvidenceResult> out;
  out.reserve(hypotheses.size());
  for (const auto& h : hypotheses) {
    const SupremumResult sup = face_supremum(spec, hypothesis_mask(spec, h), data, config, cache);
    out.push_back(evidence_from_chain(spec, h, chain, sup, config));
  }
  if (chain_out) *chain_out = std::move(chain);
  return out;
}

}  // namespace sepfam
