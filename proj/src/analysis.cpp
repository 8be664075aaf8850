#include "sepfam/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "sepfam/coxtest.hpp"
#include "sepfam/errors.hpp"
#include "sepfam/experiments.hpp"

namespace sepfam {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::optional<double> to_number(const std::string& s) {
  std::istringstream ss(s);
  double v = 0.0;
  if (!(ss >> v)) return std::nullopt;
  ss >> std::ws;
  if (!ss.eof()) return std::nullopt;
  return v;
}

// Linear interpolation between order statistics (the usual "type 7" rule).
double quantile_sorted(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

PosteriorSummaryRow summarize(std::string name, std::vector<double> draws) {
  const double n = static_cast<double>(draws.size());
  double mean = 0.0;
  for (double v : draws) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : draws) ss += (v - mean) * (v - mean);
  const double sd = draws.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  std::sort(draws.begin(), draws.end());
  return {std::move(name), mean, sd, quantile_sorted(draws, 0.025), quantile_sorted(draws, 0.5),
          quantile_sorted(draws, 0.975)};
}

const PosteriorSummaryRow& find_row(const AnalysisReport& report, const std::string& name) {
  for (const auto& r : report.posterior) {
    if (r.parameter == name) return r;
  }
  throw InputError("report has no posterior summary for '" + name + "'");
}

}  // namespace

std::vector<double> read_dataset(std::istream& in) {
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::string body = trim(line);
    if (body.empty()) continue;
    if (body.back() == ',') body = trim(body.substr(0, body.size() - 1));
    if (body.find(',') != std::string::npos) {
      throw InputError("dataset line " + std::to_string(line_no) + ": expected a single column");
    }
    const auto v = to_number(body);
    if (!v) {
      if (values.empty() && !header_seen) {
        header_seen = true;
        continue;
      }
      throw InputError("dataset line " + std::to_string(line_no) + ": cannot parse '" + body + "'");
    }
    if (!std::isfinite(*v) || !(*v > 0.0)) {
      throw InputError("dataset line " + std::to_string(line_no) + ": values must be positive");
    }
    values.push_back(*v);
  }
  if (values.empty()) throw InputError("dataset contains no observations");
  return values;
}

std::vector<double> read_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open dataset '" + path + "'");
  return read_dataset(in);
}

std::vector<FamilyId> parse_models(const std::string& name) {
  if (name == "lgw") return {FamilyId::Lognormal, FamilyId::Gamma, FamilyId::Weibull};
  if (name == "ln-w") return {FamilyId::Lognormal, FamilyId::Weibull};
  if (name == "ln-g") return {FamilyId::Lognormal, FamilyId::Gamma};
  if (name == "g-w") return {FamilyId::Gamma, FamilyId::Weibull};
  throw InputError("unknown model selection '" + name + "' (use lgw, ln-w, ln-g or g-w)");
}

std::optional<FamilyId> recommend(const std::vector<FamilyId>& components,
                                  const std::vector<EvidenceRow>& evidence) {
  const std::size_t m = components.size();
  std::vector<double> ev_zero(m, 0.0), ev_one(m, 0.0);
  std::vector<int> seen(m, 0);
  for (const auto& row : evidence) {
    const FamilyId f = parse_family(row.family);
    const auto it = std::find(components.begin(), components.end(), f);
    if (it == components.end()) continue;
    const auto k = static_cast<std::size_t>(it - components.begin());
    (row.weight_is_one ? ev_one : ev_zero)[k] = row.e_value;
    seen[k] |= row.weight_is_one ? 2 : 1;
  }
  for (std::size_t k = 0; k < m; ++k) {
    if (seen[k] != 3) return std::nullopt;
  }
  for (std::size_t k = 0; k < m; ++k) {
    if (correct_decision(k, ev_zero, ev_one)) return components[k];
  }
  return std::nullopt;
}

AnalysisReport analyze(const std::vector<double>& values, const std::vector<FamilyId>& components,
                       const FbstConfig& config) {
  const Dataset data(values);
  if (data.size() < 2) throw DegenerateDataError("analysis needs at least two observations");
  if (!(data.variance() > 0.0)) {
    throw DegenerateDataError("all observations are equal; no family can be distinguished");
  }
  const MixtureSpec spec = MixtureSpec::with_defaults(components);
  validate(spec);

  AnalysisReport report;
  report.n = data.size();
  report.mean = data.mean();
  report.variance = data.variance();
  for (FamilyId f : components) report.components.emplace_back(family_name(f));
  report.seed = config.seed;
  report.chain_length = config.chain_length;
  report.burn_in = config.burn_in;
  report.significance = config.significance;

  const auto hyps = all_weight_hypotheses(spec);
  PosteriorChain chain;
  const auto results = evaluate_hypotheses(spec, hyps, data, config, &chain);
  report.acceptance_rate = chain.diagnostics.acceptance_rate;
  report.effective_sample_size = chain.diagnostics.effective_sample_size;
  for (const auto& r : results) {
    report.evidence.push_back({describe(spec, r.hypothesis),
                               std::string(family_name(components[r.hypothesis.component])),
                               r.hypothesis.kind == Hypothesis::Kind::WeightIsOne, r.e_value,
                               r.ev_against, r.p_value, r.threshold_c, r.t, r.h, r.q_star,
                               r.verdict == Verdict::Reject});
  }

  const bool has_ln = std::count(components.begin(), components.end(), FamilyId::Lognormal) > 0;
  const bool has_w = std::count(components.begin(), components.end(), FamilyId::Weibull) > 0;
  if (has_ln && has_w) {
    for (const CoxResult& c : {cox_lognormal_null(values), cox_weibull_null(values)}) {
      const bool ln_null = c.direction == CoxDirection::LognormalNull;
      report.cox.push_back({ln_null ? "lognormal" : "weibull", ln_null ? "weibull" : "lognormal",
                            c.t_stat, c.variance, c.deviate, c.p_value, cox_rejects(c)});
    }
  }

  std::vector<double> mu, sigma2;
  std::vector<std::vector<double>> weights(components.size());
  for (const auto& s : chain.states) {
    mu.push_back(s.cp.mu);
    sigma2.push_back(s.cp.sigma2);
    for (std::size_t k = 0; k < components.size(); ++k) weights[k].push_back(s.weights[k]);
  }
  report.posterior.push_back(summarize("mu", std::move(mu)));
  report.posterior.push_back(summarize("sigma2", std::move(sigma2)));
  for (std::size_t k = 0; k < components.size(); ++k) {
    report.posterior.push_back(
        summarize("p_" + std::string(family_name(components[k])), std::move(weights[k])));
  }

  const auto pick = recommend(components, report.evidence);
  report.recommendation = pick ? std::string(family_name(*pick)) : "inconclusive";
  return report;
}

std::vector<SurvivalCurve> report_curves(const AnalysisReport& report,
                                         const std::vector<double>& data) {
  const std::vector<double> grid = default_grid(data);
  std::vector<SurvivalCurve> curves;
  curves.push_back(empirical_survival(data, grid));

  std::vector<FamilyId> components;
  std::vector<double> weights;
  for (const auto& name : report.components) {
    components.push_back(parse_family(name));
    weights.push_back(find_row(report, "p_" + name).mean);
  }
  double total = 0.0;
  for (double w : weights) total += w;
  for (double& w : weights) w /= total;
  const CommonParams cp{find_row(report, "mu").mean, find_row(report, "sigma2").mean};

  const MixtureSpec spec = MixtureSpec::with_defaults(components);
  curves.push_back(model_survival(spec, MixtureState{cp, weights}, grid, "mixture"));
  for (FamilyId f : components) {
    curves.push_back(model_survival(from_common(f, cp), grid, std::string(family_name(f))));
  }
  return curves;
}

// ---------------------------------------------------------------------------

void to_json(nlohmann::json& j, const EvidenceRow& r) {
  j = {{"hypothesis", r.hypothesis}, {"family", r.family},     {"weight_is_one", r.weight_is_one},
       {"e_value", r.e_value},       {"ev_against", r.ev_against}, {"p_value", r.p_value},
       {"threshold", r.threshold},   {"t", r.t},               {"h", r.h},
       {"q_star", r.q_star},         {"reject", r.reject}};
}

void from_json(const nlohmann::json& j, EvidenceRow& r) {
  j.at("hypothesis").get_to(r.hypothesis);
  j.at("family").get_to(r.family);
  j.at("weight_is_one").get_to(r.weight_is_one);
  j.at("e_value").get_to(r.e_value);
  j.at("ev_against").get_to(r.ev_against);
  j.at("p_value").get_to(r.p_value);
  j.at("threshold").get_to(r.threshold);
  j.at("t").get_to(r.t);
  j.at("h").get_to(r.h);
  j.at("q_star").get_to(r.q_star);
  j.at("reject").get_to(r.reject);
}

void to_json(nlohmann::json& j, const CoxRow& r) {
  j = {{"null", r.null_family}, {"alternative", r.alternative_family},
       {"t_stat", r.t_stat},    {"variance", r.variance},
       {"deviate", r.deviate},  {"p_value", r.p_value},
       {"reject", r.reject}};
}

void from_json(const nlohmann::json& j, CoxRow& r) {
  j.at("null").get_to(r.null_family);
  j.at("alternative").get_to(r.alternative_family);
  j.at("t_stat").get_to(r.t_stat);
  j.at("variance").get_to(r.variance);
  j.at("deviate").get_to(r.deviate);
  j.at("p_value").get_to(r.p_value);
  j.at("reject").get_to(r.reject);
}

void to_json(nlohmann::json& j, const PosteriorSummaryRow& r) {
  j = {{"parameter", r.parameter}, {"mean", r.mean},     {"sd", r.sd},
       {"q025", r.q025},           {"median", r.median}, {"q975", r.q975}};
}

void from_json(const nlohmann::json& j, PosteriorSummaryRow& r) {
  j.at("parameter").get_to(r.parameter);
  j.at("mean").get_to(r.mean);
  j.at("sd").get_to(r.sd);
  j.at("q025").get_to(r.q025);
  j.at("median").get_to(r.median);
  j.at("q975").get_to(r.q975);
}

void to_json(nlohmann::json& j, const AnalysisReport& r) {
  j = {{"dataset", {{"n", r.n}, {"mean", r.mean}, {"variance", r.variance}}},
       {"components", r.components},
       {"settings",
        {{"seed", r.seed},
         {"chain_length", r.chain_length},
         {"burn_in", r.burn_in},
         {"significance", r.significance}}},
       {"chain",
        {{"acceptance_rate", r.acceptance_rate},
         {"effective_sample_size", r.effective_sample_size}}},
       {"evidence", r.evidence},
       {"cox", r.cox},
       {"posterior", r.posterior},
       {"recommendation", r.recommendation}};
}

void from_json(const nlohmann::json& j, AnalysisReport& r) {
  const auto& d = j.at("dataset");
  d.at("n").get_to(r.n);
  d.at("mean").get_to(r.mean);
  d.at("variance").get_to(r.variance);
  j.at("components").get_to(r.components);
  const auto& s = j.at("settings");
  s.at("seed").get_to(r.seed);
  s.at("chain_length").get_to(r.chain_length);
  s.at("burn_in").get_to(r.burn_in);
  s.at("significance").get_to(r.significance);
  const auto& c = j.at("chain");
  c.at("acceptance_rate").get_to(r.acceptance_rate);
  c.at("effective_sample_size").get_to(r.effective_sample_size);
  j.at("evidence").get_to(r.evidence);
  j.at("cox").get_to(r.cox);
  j.at("posterior").get_to(r.posterior);
  j.at("recommendation").get_to(r.recommendation);
}

void print_report(std::ostream& out, const AnalysisReport& r) {
  const auto flags = out.flags();
  const auto prec = out.precision();
  out << std::fixed << std::setprecision(4);
  out << "n = " << r.n << ", mean = " << r.mean << ", variance = " << r.variance << "\n";
  out << "model:";
  for (const auto& c : r.components) out << ' ' << c;
  out << "  (seed " << r.seed << ", chain " << r.chain_length << ", burn-in " << r.burn_in
      << ", acceptance " << r.acceptance_rate << ")\n\n";

  out << std::left << std::setw(18) << "hypothesis" << std::right << std::setw(10) << "e-value"
      << std::setw(10) << "p-value" << std::setw(10) << "verdict" << "\n";
  for (const auto& e : r.evidence) {
    out << std::left << std::setw(18) << e.hypothesis << std::right << std::setw(10) << e.e_value
        << std::setw(10) << e.p_value << std::setw(10) << (e.reject ? "reject" : "accept") << "\n";
  }
  out << "(reject when evidence against exceeds " << r.evidence.front().threshold << ")\n";

  if (!r.cox.empty()) {
    out << "\nCox test\n";
    for (const auto& c : r.cox) {
      out << "  H0 " << std::left << std::setw(10) << c.null_family << std::right
          << " T* = " << std::setw(8) << c.deviate << "  p = " << c.p_value << "  "
          << (c.reject ? "reject" : "accept") << "\n";
    }
  }

  out << "\n" << std::left << std::setw(14) << "parameter" << std::right;
  for (const char* h : {"mean", "sd", "2.5%", "median", "97.5%"}) out << std::setw(12) << h;
  out << "\n";
  for (const auto& p : r.posterior) {
    out << std::left << std::setw(14) << p.parameter << std::right << std::setw(12) << p.mean
        << std::setw(12) << p.sd << std::setw(12) << p.q025 << std::setw(12) << p.median
        << std::setw(12) << p.q975 << "\n";
  }
  out << "\nrecommended family: " << r.recommendation << "\n";
  out.flags(flags);
  out.precision(prec);
}

}  // namespace sepfam
