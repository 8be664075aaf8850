#pragma once

// Single-dataset analysis: fit a common-parameter mixture, test every weight
// hypothesis, optionally run both Cox directions, summarize the posterior
// and name the family picked by the conjunction rule.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "sepfam/fbst.hpp"
#include "sepfam/survival.hpp"

namespace sepfam {

/// One positive value per line; '#' starts a comment; a single non-numeric
/// first line is taken as a CSV header. Throws InputError.
std::vector<double> read_dataset(std::istream& in);
std::vector<double> read_dataset(const std::string& path);

/// "lgw", "ln-w", "ln-g" or "g-w".
std::vector<FamilyId> parse_models(const std::string& name);

struct EvidenceRow {
  std::string hypothesis;  // "p_weibull=0"
  std::string family;
  bool weight_is_one;
  double e_value;
  double ev_against;
  double p_value;
  double threshold;
  std::size_t t;
  std::size_t h;
  double q_star;
  bool reject;
  friend bool operator==(const EvidenceRow&, const EvidenceRow&) = default;
};

struct CoxRow {
  std::string null_family;
  std::string alternative_family;
  double t_stat;
  double variance;
  double deviate;
  double p_value;
  bool reject;
  friend bool operator==(const CoxRow&, const CoxRow&) = default;
};

struct PosteriorSummaryRow {
  std::string parameter;  // "mu", "sigma2", "p_lognormal", ...
  double mean;
  double sd;
  double q025;
  double median;
  double q975;
  friend bool operator==(const PosteriorSummaryRow&, const PosteriorSummaryRow&) = default;
};

struct AnalysisReport {
  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;
  std::vector<std::string> components;
  std::uint64_t seed = 0;
  std::size_t chain_length = 0;
  std::size_t burn_in = 0;
  double significance = 0.05;
  double acceptance_rate = 0.0;
  double effective_sample_size = 0.0;
  std::vector<EvidenceRow> evidence;
  std::vector<CoxRow> cox;
  std::vector<PosteriorSummaryRow> posterior;
  std::string recommendation;  // family name or "inconclusive"
  friend bool operator==(const AnalysisReport&, const AnalysisReport&) = default;
};

/// Throws DegenerateDataError when all observations are equal.
AnalysisReport analyze(const std::vector<double>& data, const std::vector<FamilyId>& components,
                       const FbstConfig& config);

/// Family satisfying the conjunction rule on the report's evidence rows, if any.
std::optional<FamilyId> recommend(const std::vector<FamilyId>& components,
                                  const std::vector<EvidenceRow>& evidence);

/// Empirical curve, the mixture at its posterior means and each component at
/// the posterior-mean (mu, sigma2).
std::vector<SurvivalCurve> report_curves(const AnalysisReport& report,
                                         const std::vector<double>& data);

void to_json(nlohmann::json& j, const EvidenceRow& r);
void from_json(const nlohmann::json& j, EvidenceRow& r);
void to_json(nlohmann::json& j, const CoxRow& r);
void from_json(const nlohmann::json& j, CoxRow& r);
void to_json(nlohmann::json& j, const PosteriorSummaryRow& r);
void from_json(const nlohmann::json& j, PosteriorSummaryRow& r);
void to_json(nlohmann::json& j, const AnalysisReport& r);
void from_json(const nlohmann::json& j, AnalysisReport& r);

void print_report(std::ostream& out, const AnalysisReport& report);

}  // namespace sepfam
