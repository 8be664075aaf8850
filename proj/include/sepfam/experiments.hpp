#pragma once

// Monte Carlo harness for the two simulation protocols:
//   * pairwise: FBST on the two-component lognormal/Weibull mixture and both
//     directions of the Cox test, tabulated as acceptance/rejection rates;
//   * LGW: FBST on the three-component lognormal/gamma/Weibull mixture with the
//     six weight hypotheses, scored by the correct-decision rule.
// Every replicate draws from its own RNG stream keyed by (seed, n, replicate),
// so results do not depend on the replicate count or the worker count.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "sepfam/families.hpp"
#include "sepfam/fbst.hpp"

namespace sepfam {

enum class ScenarioMode { PairwiseLnW, Lgw3 };

struct ScenarioConfig {
  ScenarioMode mode = ScenarioMode::PairwiseLnW;
  NativeParams generator = LognormalParams{0.0, 1.0};
  std::vector<std::size_t> sample_sizes = {100};
  std::size_t replicates = 50;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  FbstConfig fbst{};
};

void validate(const ScenarioConfig& config);

/// Parses the key = value scenario format (see docs/scenario-format.md).
ScenarioConfig parse_scenario(std::istream& in);
ScenarioConfig load_scenario(const std::string& path);

nlohmann::json as_json(const ScenarioConfig& config);

/// Seeds for one replicate; depend only on (seed, n, replicate).
struct ReplicateSeeds {
  std::uint64_t data;
  std::uint64_t fbst;
};
ReplicateSeeds replicate_seeds(std::uint64_t seed, std::size_t n, std::size_t replicate);

// ---------------------------------------------------------------------------
// Pairwise lognormal / Weibull
// ---------------------------------------------------------------------------

struct PairwiseRecord {
  std::size_t n = 0;
  std::size_t replicate = 0;
  bool ok = false;
  std::string error;
  double ev_lognormal = 0.0;  // e-value of p_lognormal = 1
  double ev_weibull = 0.0;    // e-value of p_weibull = 1
  bool fbst_reject_lognormal = false;
  bool fbst_reject_weibull = false;
  double cox_deviate_lognormal_null = 0.0;
  double cox_deviate_weibull_null = 0.0;
  bool cox_reject_lognormal = false;
  bool cox_reject_weibull = false;
};

struct RateRow {
  std::string method;      // "FBST" or "Cox"
  std::string hypothesis;  // "H_lognormal" or "H_weibull"
  std::size_t n;
  std::string measure;     // "acceptance" when the hypothesis is true, else "rejection"
  double rate;
  double standard_error;   // sqrt(rate (1 - rate) / replicates)
  std::size_t replicates;  // successful replicates
  std::size_t failures;
};

struct RateTable {
  FamilyId truth;
  std::vector<RateRow> rows;
};

PairwiseRecord run_pairwise_replicate(const ScenarioConfig& config, std::size_t n,
                                      std::size_t replicate);

/// Rates as a pure function of the verdict log.
RateTable tabulate_pairwise(FamilyId truth, const std::vector<PairwiseRecord>& records);

/// Runs every (n, replicate) cell. Records already present in `previous`
/// (matched on n and replicate) are reused rather than recomputed.
std::vector<PairwiseRecord> run_pairwise_records(const ScenarioConfig& config,
                                                 const std::vector<PairwiseRecord>& previous = {});
RateTable run_pairwise(const ScenarioConfig& config);

// ---------------------------------------------------------------------------
// Lognormal-gamma-Weibull
// ---------------------------------------------------------------------------

struct LgwRecord {
  std::size_t n = 0;
  std::size_t replicate = 0;
  bool ok = false;
  std::string error;
  double mean_mu = 0.0;
  double mean_sigma2 = 0.0;
  std::array<double, 3> mean_weights{};
  std::array<double, 3> ev_zero{};  // e-values of p_k = 0, k in (L, G, W)
  std::array<double, 3> ev_one{};   // e-values of p_k = 1
  bool correct = false;
};

struct LgwRow {
  std::size_t n;
  double mean_mu;
  double mean_sigma2;
  std::array<double, 3> mean_weights;
  double correct_rate;
  double standard_error;
  std::size_t replicates;
  std::size_t failures;
};

struct LgwSummary {
  FamilyId truth;
  std::vector<LgwRow> rows;
};

/// Correct when family k has strictly the smallest e-value for p_k = 0 and
/// strictly the largest for p_k = 1. Ties count as incorrect.
bool correct_decision(std::size_t k, std::span<const double> ev_zero,
                      std::span<const double> ev_one);

LgwRecord run_lgw_replicate(const ScenarioConfig& config, std::size_t n, std::size_t replicate);
LgwSummary tabulate_lgw(FamilyId truth, const std::vector<LgwRecord>& records);
std::vector<LgwRecord> run_lgw_records(const ScenarioConfig& config,
                                       const std::vector<LgwRecord>& previous = {});
LgwSummary run_lgw(const ScenarioConfig& config);

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

void to_json(nlohmann::json& j, const PairwiseRecord& r);
void from_json(const nlohmann::json& j, PairwiseRecord& r);
void to_json(nlohmann::json& j, const LgwRecord& r);
void from_json(const nlohmann::json& j, LgwRecord& r);

nlohmann::json as_json(const RateTable& table);
nlohmann::json as_json(const LgwSummary& summary);
void write_csv(std::ostream& out, const RateTable& table);
void write_csv(std::ostream& out, const LgwSummary& summary);

/// One JSON object per line.
template <class Record>
void write_jsonl(std::ostream& out, const std::vector<Record>& records) {
  for (const auto& r : records) out << nlohmann::json(r).dump() << '\n';
}

std::vector<PairwiseRecord> read_pairwise_jsonl(std::istream& in);
std::vector<LgwRecord> read_lgw_jsonl(std::istream& in);

}  // namespace sepfam
