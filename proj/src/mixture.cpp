#include "sepfam/mixture.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include "sepfam/errors.hpp"

namespace sepfam {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// ln(logistic(x)) and ln(1 - logistic(x)) without overflow.
double log_logistic(double x) { return x >= 0.0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x)); }
double log_one_minus_logistic(double x) { return log_logistic(-x); }
double logistic(double x) {
  return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

double stick_offset(std::size_t m, std::size_t k) {
  return std::log(static_cast<double>(m - 1 - k));
}

// Per-component log densities for a state, or nullopt for components that
// are either zero-weighted or cannot be parametrized.
struct PreparedComponent {
  double log_weight;
  LogDensity density;
};

std::optional<std::vector<PreparedComponent>> prepare(const MixtureSpec& spec,
                                                      const MixtureState& state) {
  std::vector<PreparedComponent> out;
  out.reserve(spec.size());
  for (std::size_t k = 0; k < spec.size(); ++k) {
    const double w = state.weights[k];
    if (w <= 0.0) continue;
    try {
      out.push_back({std::log(w), LogDensity(from_common(spec.components[k], state.cp))});
    } catch (const NoRootError&) {
      return std::nullopt;
    } catch (const DomainError&) {
      return std::nullopt;
    }
  }
  return out;
}

}  // namespace

Dataset::Dataset(std::vector<double> values) : values_(std::move(values)) {
  logs_.reserve(values_.size());
  for (double y : values_) {
    if (!(y > 0.0) || !std::isfinite(y)) {
      throw DomainError("dataset values must be positive and finite");
    }
    logs_.push_back(std::log(y));
  }
}

double Dataset::mean() const {
  if (values_.empty()) throw DomainError("mean of an empty dataset");
  return std::accumulate(values_.begin(), values_.end(), 0.0) / static_cast<double>(size());
}

double Dataset::variance() const {
  const double m = mean();
  double ss = 0.0;
  for (double y : values_) ss += (y - m) * (y - m);
  return ss / static_cast<double>(size());
}

double GammaPrior::logpdf(double x) const {
  if (!(x > 0.0) || !std::isfinite(x)) return kNegInf;
  return (shape - 1.0) * std::log(x) - x / scale - log_gamma(shape) - shape * std::log(scale);
}

MixtureSpec MixtureSpec::with_defaults(std::vector<FamilyId> components) {
  MixtureSpec spec;
  spec.concentration.assign(components.size(), 1.0);
  spec.components = std::move(components);
  validate(spec);
  return spec;
}

void validate(const MixtureSpec& spec, std::size_t min_components) {
  if (spec.components.size() < min_components) {
    throw DomainError("mixture needs at least " + std::to_string(min_components) +
                      " components");
  }
  if (spec.concentration.size() != spec.components.size()) {
    throw DomainError("one Dirichlet concentration per component is required");
  }
  for (double a : spec.concentration) {
    if (!(a >= 1.0) || !std::isfinite(a)) {
      throw DomainError("Dirichlet concentrations must be finite and >= 1");
    }
  }
  for (const auto& prior : {spec.prior_mu, spec.prior_sigma2}) {
    if (!(prior.shape > 0.0) || !(prior.scale > 0.0) || !std::isfinite(prior.shape) ||
        !std::isfinite(prior.scale)) {
      throw DomainError("gamma prior requires positive shape and scale");
    }
  }
}

void validate(const MixtureSpec& spec, const MixtureState& state) {
  validate(state.cp);
  if (state.weights.size() != spec.size()) {
    throw DomainError("weight vector length does not match the number of components");
  }
  double total = 0.0;
  for (double w : state.weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw DomainError("weights must be non-negative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw DomainError("weights must sum to one");
}

WorkingPoint to_working(const MixtureSpec& spec, const MixtureState& state) {
  validate(spec, state);
  const std::size_t m = spec.size();
  WorkingPoint w(static_cast<Eigen::Index>(2 + m - 1));
  w[0] = std::log(state.cp.mu);
  w[1] = std::log(state.cp.sigma2);
  double remaining = 1.0;
  for (std::size_t k = 0; k + 1 < m; ++k) {
    const double p = state.weights[k];
    const double rest = remaining - p;
    if (!(p > 0.0) || !(rest > 0.0)) {
      throw DomainError("to_working: state lies on the simplex boundary");
    }
    w[static_cast<Eigen::Index>(2 + k)] = std::log(p) - std::log(rest) + stick_offset(m, k);
    remaining = rest;
  }
  return w;
}

MixtureState from_working(const MixtureSpec& spec, const WorkingPoint& point) {
  const std::size_t m = spec.size();
  if (static_cast<std::size_t>(point.size()) != 2 + m - 1) {
    throw DomainError("working point has the wrong dimension");
  }
  if (!point.allFinite()) throw DomainError("working point must be finite");
  MixtureState state;
  state.cp = {std::exp(point[0]), std::exp(point[1])};
  state.weights.resize(m);
  double remaining = 1.0;
  for (std::size_t k = 0; k + 1 < m; ++k) {
    const double v = logistic(point[static_cast<Eigen::Index>(2 + k)] - stick_offset(m, k));
    state.weights[k] = remaining * v;
    remaining *= 1.0 - v;
  }
  state.weights[m - 1] = remaining;
  return state;
}

double log_jacobian(const MixtureSpec& spec, const WorkingPoint& point) {
  const std::size_t m = spec.size();
  double lj = point[0] + point[1];
  double log_remaining = 0.0;
  for (std::size_t k = 0; k + 1 < m; ++k) {
    const double x = point[static_cast<Eigen::Index>(2 + k)] - stick_offset(m, k);
    lj += log_remaining + log_logistic(x) + log_one_minus_logistic(x);
    log_remaining += log_one_minus_logistic(x);
  }
  return lj;
}

double loglik(const MixtureSpec& spec, const MixtureState& state, const Dataset& data) {
  if (data.empty()) return 0.0;
  const auto prepared = prepare(spec, state);
  if (!prepared || prepared->empty()) return kNegInf;
  const auto& comps = *prepared;
  const auto ys = data.values();
  const auto lys = data.logs();
  double total = 0.0;
  if (comps.size() == 1) {
    const auto& c = comps.front();
    for (std::size_t j = 0; j < ys.size(); ++j) total += c.density(ys[j], lys[j]);
    return std::isnan(total) ? kNegInf : total + static_cast<double>(ys.size()) * c.log_weight;
  }
  std::array<double, 8> terms{};
  if (comps.size() > terms.size()) throw DomainError("too many mixture components");
  for (std::size_t j = 0; j < ys.size(); ++j) {
    double peak = kNegInf;
    for (std::size_t k = 0; k < comps.size(); ++k) {
      terms[k] = comps[k].log_weight + comps[k].density(ys[j], lys[j]);
      peak = std::max(peak, terms[k]);
    }
    if (!std::isfinite(peak)) return kNegInf;
    double acc = 0.0;
    for (std::size_t k = 0; k < comps.size(); ++k) acc += std::exp(terms[k] - peak);
    total += peak + std::log(acc);
  }
  return total;
}

double logprior(const MixtureSpec& spec, const MixtureState& state) {
  double lp = spec.prior_mu.logpdf(state.cp.mu) + spec.prior_sigma2.logpdf(state.cp.sigma2);
  if (spec.size() > 1) {
    double sum_a = 0.0;
    for (std::size_t k = 0; k < spec.size(); ++k) {
      const double a = spec.concentration[k];
      sum_a += a;
      lp -= log_gamma(a);
      if (a != 1.0) {
        lp += state.weights[k] > 0.0 ? (a - 1.0) * std::log(state.weights[k]) : kNegInf;
      }
    }
    lp += log_gamma(sum_a);
  }
  return lp;
}

double logposterior(const MixtureSpec& spec, const MixtureState& state, const Dataset& data) {
  const double lp = logprior(spec, state);
  if (!std::isfinite(lp)) return kNegInf;
  const double ll = loglik(spec, state, data);
  return std::isfinite(ll) ? lp + ll : kNegInf;
}

double logposterior_working(const MixtureSpec& spec, const WorkingPoint& point,
                            const Dataset& data) {
  if (!point.allFinite()) return kNegInf;
  const MixtureState state = from_working(spec, point);
  if (!(state.cp.mu > 0.0) || !(state.cp.sigma2 > 0.0) || !std::isfinite(state.cp.mu) ||
      !std::isfinite(state.cp.sigma2)) {
    return kNegInf;
  }
  const double lj = log_jacobian(spec, point);
  if (!std::isfinite(lj)) return kNegInf;
  const double lp = logposterior(spec, state, data);
  return std::isfinite(lp) ? lp + lj : kNegInf;
}

double mixture_pdf(const MixtureSpec& spec, const MixtureState& state, double y) {
  if (!(y > 0.0)) return 0.0;
  double total = 0.0;
  for (std::size_t k = 0; k < spec.size(); ++k) {
    if (state.weights[k] <= 0.0) continue;
    total += state.weights[k] * std::exp(logpdf_common(spec.components[k], state.cp, y));
  }
  return total;
}

}  // namespace sepfam
